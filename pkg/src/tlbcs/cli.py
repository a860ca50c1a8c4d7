"""Command-line interface: ``tlbcs {phantom,mask,simulate,reconstruct,metrics,clustermap}``.

Exit codes: 0 success, 2 usage/config/input error, 1 numerical failure.
"""
import argparse
import contextlib
import logging
import sys
import typing
from dataclasses import fields

import numpy as np

from . import io
from .errors import ConfigError, InfeasibleIterateError, InvalidInputError, NumericalError
from .metrics import hfen, pixel_cluster_map, psnr
from .objective import write_stats_csv
from .patches import PatchGeometry
from .phantom import shepp_logan
from .reconstructor import SolverConfig, reconstruct
from .sampling import (SamplingMask, make_cartesian_mask, make_random2d_mask, measure,
                       zero_filled_spectrum)

log = logging.getLogger("tlbcs")


def _field_types():
    hints = typing.get_type_hints(SolverConfig)
    out = {}
    for f in fields(SolverConfig):
        if f.name == "initial_labels":
            continue
        tp = hints[f.name]
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        out[f.name] = (args[0] if args else tp, bool(args))
    return out


def _coerce(key, value, tp, optional):
    if optional and str(value).lower() in ("", "none", "auto"):
        return None
    try:
        if tp is bool:
            v = str(value).lower()
            if v not in ("1", "0", "true", "false", "yes", "no"):
                raise ValueError(value)
            return v in ("1", "true", "yes")
        if tp is int:
            return int(value)
        if tp is float:
            return float(value)
        return str(value)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}", [key]) from None


def build_config(file_values, overrides):
    """Merge config-file values with command-line overrides into a SolverConfig."""
    types = _field_types()
    unknown = sorted(set(file_values) - set(types))
    if unknown:
        raise ConfigError("unknown configuration keys: " + ", ".join(unknown), unknown)
    merged = dict(file_values)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    kwargs, bad = {}, []
    for key, value in merged.items():
        try:
            kwargs[key] = _coerce(key, value, *types[key])
        except ConfigError:
            bad.append(key)
    if bad:
        raise ConfigError("invalid configuration keys: " + ", ".join(bad), bad)
    return SolverConfig(**kwargs).validate()


def _fmt_metrics(p, h):
    return f"psnr_db={p:.6f} hfen={h:.6f}"


def cmd_phantom(args):
    io.write_cimg(args.out, shepp_logan(args.size))


def cmd_mask(args):
    make = make_cartesian_mask if args.type == "cartesian" else make_random2d_mask
    m = make(args.height, args.width, args.uf, args.seed)
    io.write_mask(args.out, m.mask)
    print(f"samples={m.num_samples} undersampling={m.mask.size / m.num_samples:.4f}")


def cmd_simulate(args):
    img = io.read_cimg(args.image)
    mask = SamplingMask.from_array(io.read_mask(args.mask), seed=args.seed)
    if img.shape != mask.shape:
        raise InvalidInputError(f"image {img.shape} and mask {mask.shape} differ in shape")
    y = measure(img, mask, args.noise_sigma, args.seed)
    io.write_cimg(f"{args.out_prefix}.s0.cimg", zero_filled_spectrum(y, mask))
    io.write_mask(f"{args.out_prefix}.mask.msk", mask.mask)


def load_measurements(prefix):
    """Read ``prefix.s0.cimg`` and ``prefix.mask.msk``; return ``(y, mask)``."""
    mask = SamplingMask.from_array(io.read_mask(f"{prefix}.mask.msk"))
    S0 = io.read_cimg(f"{prefix}.s0.cimg")
    if S0.shape != mask.shape:
        raise InvalidInputError("measurement spectrum and mask differ in shape")
    return S0[mask.mask], mask


def cmd_reconstruct(args):
    file_values = io.read_config(args.config) if args.config else {}
    overrides = {k: getattr(args, k) for k in _field_types()}
    config = build_config(file_values, overrides)
    if args.init_labels:
        config.initial_labels = io.read_labels(args.init_labels)
        config.init_clustering = "provided"
        config.validate()
    y, mask = load_measurements(args.meas_prefix)
    reference = None
    if args.reference:
        reference = io.read_cimg(args.reference)
        if reference.shape != mask.shape:
            raise InvalidInputError("reference and measurement shapes differ")
    result = reconstruct(y, mask, config, reference=reference)
    q = args.out_prefix
    io.write_cimg(f"{q}.recon.cimg", result.image)
    write_stats_csv(f"{q}.stats.csv", result.stats)
    io.write_transforms(f"{q}.transforms.utfs", result.transforms)
    io.write_labels(f"{q}.labels.bin", result.labels)
    if reference is not None:
        print(_fmt_metrics(psnr(result.image, reference), hfen(result.image, reference)))


def cmd_metrics(args):
    recon = io.read_cimg(args.recon)
    ref = io.read_cimg(args.reference)
    print(_fmt_metrics(psnr(recon, ref), hfen(recon, ref)))


def cmd_clustermap(args):
    labels = io.read_labels(args.labels)
    geom = PatchGeometry(args.patch_side, args.stride, args.height, args.width)
    cmap = pixel_cluster_map(labels, geom, K=args.K)
    io.write_cimg(args.out, cmap.astype(float))


def build_parser():
    p = argparse.ArgumentParser(prog="tlbcs", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None, help="cap BLAS worker threads")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("phantom", help="write a Shepp-Logan phantom as CIMG")
    s.add_argument("--size", type=int, default=64)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_phantom)

    s = sub.add_parser("mask", help="generate a sampling mask")
    s.add_argument("--type", choices=("cartesian", "random2d"), required=True)
    s.add_argument("--height", type=int, required=True)
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--uf", type=float, required=True, help="undersampling factor (> 1)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_mask)

    s = sub.add_parser("simulate", help="simulate undersampled k-space measurements")
    s.add_argument("--image", required=True)
    s.add_argument("--mask", required=True)
    s.add_argument("--noise-sigma", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-prefix", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("reconstruct", help="run the blind CS reconstruction")
    s.add_argument("--meas-prefix", required=True)
    s.add_argument("--config", default=None, help="key=value file of solver settings")
    s.add_argument("--out-prefix", required=True)
    s.add_argument("--reference", default=None)
    s.add_argument("--init-labels", default=None, help="labels file for provided clustering")
    for name in _field_types():
        s.add_argument("--" + name.replace("_", "-"), dest=name, default=None, metavar="VALUE")
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("metrics", help="PSNR and HFEN between two CIMG images")
    s.add_argument("--recon", required=True)
    s.add_argument("--reference", required=True)
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("clustermap", help="majority-vote pixel cluster map from a labels file")
    s.add_argument("--labels", required=True)
    s.add_argument("--height", type=int, required=True)
    s.add_argument("--width", type=int, required=True)
    s.add_argument("--patch-side", type=int, default=6)
    s.add_argument("--stride", type=int, default=1)
    s.add_argument("--K", type=int, default=None)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_clustermap)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    limiter = contextlib.nullcontext()
    if args.threads:
        from threadpoolctl import threadpool_limits
        limiter = threadpool_limits(limits=args.threads)
    try:
        with limiter:
            args.func(args)
    except (ConfigError, InvalidInputError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"tlbcs {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, InfeasibleIterateError, np.linalg.LinAlgError) as exc:
        print(f"tlbcs {args.command}: numerical error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
