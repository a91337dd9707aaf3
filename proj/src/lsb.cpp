#include "sig/lsb.hpp"

#include <bit>

#include "sig/error.hpp"

namespace sig {

ChannelMask ChannelMask::from_bits(std::uint8_t bits) {
    if (bits == 0 || bits > 7) {
        throw Error(ErrorKind::InvalidParams, "channel mask bits must be in 1..7, got " + std::to_string(bits));
    }
    return ChannelMask(bits);
}

std::optional<ChannelMask> ChannelMask::from_token(std::string_view token) {
    for (const ChannelMask& m : all()) {
        if (m.token() == token) return m;
    }
    return std::nullopt;
}

const std::array<ChannelMask, 7>& ChannelMask::all() {
    static const std::array<ChannelMask, 7> masks = {
        ChannelMask(kR),      ChannelMask(kG),      ChannelMask(kB),           ChannelMask(kR | kG),
        ChannelMask(kR | kB), ChannelMask(kG | kB), ChannelMask(kR | kG | kB),
    };
    return masks;
}

unsigned ChannelMask::size() const noexcept { return static_cast<unsigned>(std::popcount(bits_)); }

std::string ChannelMask::token() const {
    std::string out;
    for (Channel ch : kChannels) {
        if (contains(ch)) out.push_back(channel_letter(ch));
    }
    return out;
}

void EmbedParams::validate() const {
    if (rows < 1) throw Error(ErrorKind::InvalidParams, "rows must be at least 1");
    if (bits < 1 || bits > 8) {
        throw Error(ErrorKind::InvalidParams, "bits must be in 1..8, got " + std::to_string(bits));
    }
}

std::string EmbedParams::describe() const {
    return "mask=" + mask.token() + " rows=" + std::to_string(rows) + " bits=" + std::to_string(bits);
}

BitStream BitStream::from_bytes(std::span<const std::uint8_t> bytes) {
    BitStream out;
    out.reserve(bytes.size() * 8);
    for (std::uint8_t byte : bytes) {
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((byte >> i) & 1u));
    }
    return out;
}

std::vector<std::uint8_t> BitStream::to_bytes() const {
    std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out[i / 8] = static_cast<std::uint8_t>(out[i / 8] | (bits_[i] << (7 - i % 8)));
    }
    return out;
}

std::uint64_t capacity_bits(std::uint32_t width, const EmbedParams& params) {
    return std::uint64_t{width} * params.rows * params.mask.size() * params.bits;
}

BitStream expand_payload(const PayloadSpec& payload, std::uint64_t capacity) {
    if (payload.message_bits() > capacity) {
        throw Error(ErrorKind::PayloadTooLarge, "message needs " + std::to_string(payload.message_bits()) +
                                                    " bits, region holds " + std::to_string(capacity));
    }
    BitStream out = BitStream::from_bytes(payload.message);
    out.reserve(capacity);
    SplitMix64 rng(payload.pad_seed);
    std::uint64_t word = 0;
    int left = 0;
    while (out.size() < capacity) {
        if (left == 0) {
            word = rng.next();
            left = 64;
        }
        --left;
        out.push_back(static_cast<std::uint8_t>((word >> left) & 1u));
    }
    return out;
}

namespace {

void check_region(const RasterImage& img, const EmbedParams& params) {
    params.validate();
    if (params.rows > img.height()) {
        throw Error(ErrorKind::RowsExceedHeight, "rows=" + std::to_string(params.rows) + " exceeds image height " +
                                                     std::to_string(img.height()));
    }
}

// Calls fn(byte&) for every selected channel byte of the region, in embed order.
template <typename Bytes, typename Fn>
void for_each_region_byte(Bytes data, std::uint32_t width, const EmbedParams& params, Fn&& fn) {
    const std::size_t region = std::size_t{width} * params.rows;
    for (std::size_t px = 0; px < region; ++px) {
        for (Channel ch : kChannels) {
            if (params.mask.contains(ch)) {
                if (!fn(data[px * 3 + static_cast<std::size_t>(ch)])) return;
            }
        }
    }
}

}  // namespace

RasterImage embed(const RasterImage& cover, const EmbedParams& params, const PayloadSpec& payload) {
    check_region(cover, params);
    const BitStream stream = expand_payload(payload, capacity_bits(cover.width(), params));
    RasterImage out = cover;
    const auto keep = static_cast<std::uint8_t>(params.bits == 8 ? 0u : (0xFFu << params.bits));
    std::size_t next = 0;
    for_each_region_byte(out.data(), out.width(), params, [&](std::uint8_t& byte) {
        std::uint8_t low = 0;
        for (std::uint32_t b = 0; b < params.bits; ++b) low = static_cast<std::uint8_t>(low | (stream[next++] << b));
        byte = static_cast<std::uint8_t>((byte & keep) | low);
        return true;
    });
    return out;
}

BitStream extract(const RasterImage& stego, const EmbedParams& params, std::uint64_t n_bits) {
    check_region(stego, params);
    const std::uint64_t capacity = capacity_bits(stego.width(), params);
    if (n_bits > capacity) {
        throw Error(ErrorKind::RequestExceedsCapacity, "requested " + std::to_string(n_bits) +
                                                           " bits, region holds " + std::to_string(capacity));
    }
    BitStream out;
    out.reserve(n_bits);
    if (n_bits == 0) return out;
    for_each_region_byte(stego.data(), stego.width(), params, [&](const std::uint8_t& byte) {
        for (std::uint32_t b = 0; b < params.bits && out.size() < n_bits; ++b) {
            out.push_back(static_cast<std::uint8_t>((byte >> b) & 1u));
        }
        return out.size() < n_bits;
    });
    return out;
}

std::vector<std::uint8_t> extract_message(const RasterImage& stego, const EmbedParams& params, std::size_t n_bytes) {
    return extract(stego, params, std::uint64_t{n_bytes} * 8).to_bytes();
}

}  // namespace sig
