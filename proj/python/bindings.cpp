#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cli.hpp"
#include "sig/corpus.hpp"
#include "sig/error.hpp"
#include "sig/forensics.hpp"
#include "sig/lsb.hpp"
#include "sig/sweep.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace sig;

namespace {

PyObject* g_sig_error = nullptr;

EmbedParams make_params(const std::string& channels, std::uint32_t rows, std::uint32_t bits) {
    const auto mask = ChannelMask::from_token(channels);
    if (!mask) throw Error(ErrorKind::InvalidParams, "channels must be one of R,G,B,RG,RB,GB,RGB, got '" + channels + "'");
    EmbedParams p{*mask, rows, bits};
    p.validate();
    return p;
}

py::dict params_dict(const EmbedParams& p) {
    py::dict d;
    d["channels"] = p.mask.token();
    d["rows"] = p.rows;
    d["bits"] = p.bits;
    return d;
}

py::bytes as_bytes(std::span<const std::uint8_t> data) {
    return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

std::vector<std::uint8_t> to_vector(const py::bytes& b) {
    const std::string_view s = b;
    return {s.begin(), s.end()};
}

std::optional<ImageFormat> format_arg(const std::optional<std::string>& text) {
    if (!text) return std::nullopt;
    const auto f = parse_format(*text);
    if (!f) throw Error(ErrorKind::UnsupportedFormat, "output format must be bmp or png, got '" + *text + "'");
    return f;
}

}  // namespace

PYBIND11_MODULE(_sigtool, m) {
    m.doc() = "LSB stego-database generation, extraction and verification";

    g_sig_error = PyErr_NewException("sigtool._sigtool.SigError", PyExc_Exception, nullptr);
    m.attr("SigError") = py::handle(g_sig_error);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            const py::tuple args = py::make_tuple(std::string(kind_name(e.kind())), e.what());
            PyErr_SetObject(g_sig_error, args.ptr());
        }
    });

    py::class_<RasterImage>(m, "Image")
        .def(py::init([](std::uint32_t w, std::uint32_t h, std::optional<py::bytes> data) {
                 if (!data) return RasterImage(w, h);
                 return RasterImage(w, h, to_vector(*data));
             }),
             py::arg("width"), py::arg("height"), py::arg("data") = py::none())
        .def_property_readonly("width", &RasterImage::width)
        .def_property_readonly("height", &RasterImage::height)
        .def_property_readonly("data", [](const RasterImage& img) { return as_bytes(img.data()); },
                               "Row-major RGB bytes, 3 per pixel.")
        .def(py::self == py::self)
        .def("__repr__", [](const RasterImage& img) {
            return "<Image " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + ">";
        });

    m.def("load_image", [](const fs::path& path) { return load_image(path); }, py::arg("path"));
    m.def("save_image",
          [](const RasterImage& img, const fs::path& path, const std::string& format) {
              save_image(img, path, *format_arg(format));
          },
          py::arg("image"), py::arg("path"), py::arg("format") = "png");

    m.def("capacity_bits",
          [](std::uint32_t width, const std::string& channels, std::uint32_t rows, std::uint32_t bits) {
              return capacity_bits(width, make_params(channels, rows, bits));
          },
          py::arg("width"), py::arg("channels"), py::arg("rows"), py::arg("bits"));

    m.def("embed",
          [](const RasterImage& cover, const py::bytes& message, const std::string& channels, std::uint32_t rows,
             std::uint32_t bits, std::uint64_t pad_seed) {
              const EmbedParams p = make_params(channels, rows, bits);
              const PayloadSpec payload{to_vector(message), pad_seed};
              py::gil_scoped_release release;
              return embed(cover, p, payload);
          },
          py::arg("cover"), py::arg("message"), py::arg("channels"), py::arg("rows"), py::arg("bits"),
          py::arg("pad_seed") = 0);

    m.def("extract",
          [](const RasterImage& stego, std::size_t n_bytes, const std::string& channels, std::uint32_t rows,
             std::uint32_t bits) { return as_bytes(extract_message(stego, make_params(channels, rows, bits), n_bytes)); },
          py::arg("stego"), py::arg("n_bytes"), py::arg("channels"), py::arg("rows"), py::arg("bits"));

    m.def("variant_name",
          [](const std::string& stem, const std::string& channels, std::uint32_t rows, std::uint32_t bits) {
              return variant_name(stem, make_params(channels, rows, bits)).str();
          },
          py::arg("stem"), py::arg("channels"), py::arg("rows"), py::arg("bits"));

    m.def("parse_variant_name", [](const std::string& name) {
        const VariantName v = parse_variant_name(name);
        py::dict d = params_dict(v.params);
        d["stem"] = v.stem;
        return d;
    });

    m.def("diff", [](const RasterImage& cover, const RasterImage& stego) {
        const DiffReport r = diff(cover, stego);
        py::dict d;
        d["identical"] = r.identical();
        d["touched_rows"] = std::vector<std::uint32_t>(r.touched_rows.begin(), r.touched_rows.end());
        d["touched_channels"] = r.channels_token();
        d["changed_byte_count"] = r.changed_byte_count;
        d["changed_bit_count"] = r.changed_bit_count;
        d["max_bitplane_changed"] = r.max_bitplane_changed;
        d["max_channel_delta"] = r.max_channel_delta;
        return d;
    });

    m.def("infer_params", [](const RasterImage& cover, const RasterImage& stego) {
        return params_dict(infer_params(cover, stego));
    });

    m.def("build_database",
          [](const fs::path& covers_dir, const fs::path& out_dir, std::uint64_t seed, const py::bytes& message,
             unsigned jobs, std::optional<std::string> format, bool skip_oversize,
             std::map<std::string, std::string> category_map) {
              CategoryRule rule;
              rule.mapping = std::move(category_map);
              BuildOptions opts{jobs, skip_oversize, format_arg(format)};
              const PayloadSpec payload{to_vector(message), seed};
              py::gil_scoped_release release;
              std::vector<Rejection> rejections;
              const auto covers = ingest_covers(covers_dir, rule, &rejections);
              const Manifest mf = build_database(covers, SweepGrid::default_grid(), payload, out_dir, opts);
              write_rejection_report(rejections, out_dir / "rejections.txt");
              py::gil_scoped_acquire acquire;
              py::dict d;
              d["covers"] = mf.covers.size();
              d["entries"] = mf.entries.size();
              d["skipped"] = mf.skipped_count();
              d["failures"] = mf.failures.size();
              d["rejections"] = rejections.size();
              d["manifest"] = out_dir / kManifestFileName;
              return d;
          },
          py::arg("covers_dir"), py::arg("out_dir"), py::arg("seed"), py::arg("message"), py::arg("jobs") = 1,
          py::arg("format") = py::none(), py::arg("skip_oversize") = false,
          py::arg("category_map") = std::map<std::string, std::string>{},
          "Sweeps every cover under covers_dir over the default 63-cell grid.");

    m.def("verify",
          [](const fs::path& manifest_path, unsigned jobs) {
              const Manifest mf = read_manifest(manifest_path);
              std::vector<Verdict> verdicts;
              {
                  py::gil_scoped_release release;
                  verdicts = verify_manifest(mf, manifest_path.parent_path(), jobs);
              }
              py::list out;
              for (const Verdict& v : verdicts) {
                  py::dict d;
                  d["cover_id"] = v.cover_id;
                  d["variant_name"] = v.variant_name;
                  d["passed"] = v.passed();
                  d["skipped"] = v.skipped;
                  d["unverifiable"] = v.unverifiable;
                  d["summary"] = v.summary_line();
                  out.append(d);
              }
              return out;
          },
          py::arg("manifest_path"), py::arg("jobs") = 1);

    m.def("run_cli",
          [](const std::vector<std::string>& args) {
              std::ostringstream out, err;
              const int code = cli::run(args, out, err);
              return py::make_tuple(code, out.str(), err.str());
          },
          py::arg("args"), "Runs a CLI command in-process; returns (exit_code, stdout, stderr).");
}
