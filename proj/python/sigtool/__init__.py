"""Python bindings for the sig stego-database toolkit."""

from ._sigtool import (
    Image,
    SigError,
    build_database,
    capacity_bits,
    diff,
    embed,
    extract,
    infer_params,
    load_image,
    parse_variant_name,
    run_cli,
    save_image,
    variant_name,
    verify,
)

SigError.kind = property(lambda self: self.args[0], doc="Error kind name, e.g. 'PayloadTooLarge'.")

__all__ = [
    "Image",
    "SigError",
    "build_database",
    "capacity_bits",
    "diff",
    "embed",
    "extract",
    "infer_params",
    "load_image",
    "parse_variant_name",
    "run_cli",
    "save_image",
    "variant_name",
    "verify",
]
