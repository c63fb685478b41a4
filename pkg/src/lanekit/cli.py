"""``lanekit`` command line.

Exit status: 0 on success, 2 for bad input (arguments, malformed files),
3 when prediction and ground-truth datasets are inconsistent.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import coordmaps, losses
from .errors import DatasetError, LaneKitError
from .evaluation import EvalConfig, evaluate_dataset, resolve_workers
from .fov import fov_name, fov_window
from .io import DatasetIndex, read_categories, read_lanes, read_list, report_csv, report_json
from .lane_model import ImageSpec, sample_lane_at_rows
from .render import demo_lane, render_overlay
from .sampling import DEFAULT_BASE, DEFAULT_N_SAMPLE, RowSampler
from .synth import SynthConfig, gen_synthetic

log = logging.getLogger("lanekit")

EXIT_INPUT = 2
EXIT_DATASET = 3


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _named_paths(items):
    out = {}
    for item in items or ():
        name, sep, path = item.partition("=")
        if not sep or not name:
            raise ValueError(f"expected name=path, got {item!r}")
        out[name] = path
    return out


def parse_rows(text, height, cut_height=0):
    """Anchor spec: ``uniform:N``, ``focusing:N[:base]`` or ``r1,r2,...``.

    Sampler specs cover the cropped view and are shifted to image rows;
    explicit lists are taken as image rows.
    """
    mode, _, rest = text.partition(":")
    if mode in ("uniform", "focusing"):
        n_text, _, base = rest.partition(":")
        sampler = RowSampler(
            height=height - cut_height,
            n_sample=int(n_text) if n_text else DEFAULT_N_SAMPLE,
            mode=mode,
            base=float(base) if base else DEFAULT_BASE,
        )
        return sampler.rows() + cut_height
    return np.array([int(v) for v in text.split(",")], dtype=np.int64)


def cmd_eval(args):
    spec = ImageSpec(args.img_w, args.img_h, args.cut_height)
    if args.list:
        ids = read_list(args.list)
        gt = DatasetIndex.from_list(args.gt_root, ids)
        pred = DatasetIndex.from_list(args.pred_root, ids)
    else:
        gt = DatasetIndex.scan(args.gt_root)
        pred = DatasetIndex.scan(args.pred_root)
    cat_lists = _named_paths(args.category_lists)
    categories = read_categories(cat_lists, args.no_lane.split(",")) if cat_lists else None
    base = EvalConfig(spec=spec, lane_width_px=args.width)
    gt_lanes, pred_lanes = gt.load_lanes(), pred.load_lanes()
    workers = resolve_workers(args.workers)
    reports = {}
    for fraction in _floats(args.fov):
        cfg = base.with_window(fov_window(spec, fraction))
        reports[fov_name(fraction)] = evaluate_dataset(
            pred_lanes, gt_lanes, categories, cfg, workers=workers
        )
    text = report_json(reports)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(report_csv(reports))
    return 0


def cmd_sample(args):
    sampler = RowSampler(height=args.height, n_sample=args.n, mode=args.mode, base=args.base)
    rows = sampler.rows()
    print(json.dumps({"mode": sampler.mode.value, "height": args.height, "base": args.base,
                      "rows": rows.tolist()}))
    if args.svg_out:
        spec = ImageSpec(args.img_w, args.cut_height + args.height, args.cut_height)
        lane = read_lanes(args.lane_file)[0] if args.lane_file else demo_lane(spec)
        Path(args.svg_out).write_text(
            render_overlay(lane, rows, spec, title=f"{sampler.mode.value} sampling")
        )
    return 0


def cmd_loss(args):
    pred_lanes, tgt_lanes = read_lanes(args.pred), read_lanes(args.target)
    if not pred_lanes or not tgt_lanes:
        raise ValueError("both lane files must contain at least one lane")
    rows = parse_rows(args.rows, args.img_h, args.cut_height)
    pred = sample_lane_at_rows(pred_lanes[0], rows)
    tgt = sample_lane_at_rows(tgt_lanes[0], rows)
    cfg = losses.ExpansionConfig(args.m)
    k = losses.DIoUCoefficients(args.alpha, args.beta, args.gamma)
    record = {
        "p_iou": losses.p_iou(pred, tgt, cfg),
        "dl_iou": losses.dl_iou(pred, tgt, cfg),
        "dr_iou": losses.dr_iou(pred, tgt, cfg),
        "d_iou_loss": losses.d_iou_loss(pred, tgt, cfg, k),
        "grad": losses.d_iou_grad(pred, tgt, cfg, k).tolist(),
    }
    print(json.dumps(record))
    return 0


def cmd_gen_synth(args):
    lo, hi = (int(v) for v in args.lanes.split(","))
    cfg = SynthConfig(seed=args.seed, n_images=args.images, perturbation_px=args.perturb,
                      lanes_per_image=(lo, hi))
    gen_synthetic(cfg, args.out_dir)
    print(f"wrote {args.images} image(s) to {args.out_dir}")
    return 0


def cmd_coordmaps(args):
    coordmaps.dump_coord_maps(coordmaps.make_coord_maps(args.w, args.h), args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="lanekit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eval", help="F1/mF1 evaluation with optional partial field of view")
    e.add_argument("--gt-root", required=True)
    e.add_argument("--pred-root", required=True)
    e.add_argument("--list", help="image list file; default scans gt/pred roots")
    e.add_argument("--category-lists", nargs="*", metavar="NAME=PATH")
    e.add_argument("--no-lane", default="cross", help="comma list of no-lane categories")
    e.add_argument("--width", type=int, default=30, help="lane stroke width in pixels")
    e.add_argument("--img-w", type=int, default=1640)
    e.add_argument("--img-h", type=int, default=590)
    e.add_argument("--cut-height", type=int, default=270)
    e.add_argument("--fov", default="1", help="comma list of window fractions")
    e.add_argument("--out", help="JSON report path (default stdout)")
    e.add_argument("--csv", help="per-category CSV path")
    e.add_argument("--workers", type=int, help="worker processes (default $LANEKIT_THREADS or 1)")
    e.set_defaults(func=cmd_eval)

    s = sub.add_parser("sample", help="print row anchors, optionally as an SVG overlay")
    s.add_argument("--n", type=int, default=DEFAULT_N_SAMPLE)
    s.add_argument("--height", type=int, default=320, help="height of the cropped view")
    s.add_argument("--base", type=float, default=DEFAULT_BASE)
    s.add_argument("--mode", choices=("uniform", "focusing"), default="focusing")
    s.add_argument("--svg-out")
    s.add_argument("--lane-file", help="draw the first lane of this file instead of a demo lane")
    s.add_argument("--img-w", type=int, default=1640)
    s.add_argument("--cut-height", type=int, default=270)
    s.set_defaults(func=cmd_sample)

    l = sub.add_parser("loss", help="directional IoU loss between two lanes")
    l.add_argument("pred")
    l.add_argument("target")
    l.add_argument("--m", type=float, default=losses.DEFAULT_EXPANSION)
    l.add_argument("--alpha", type=float, default=1.0)
    l.add_argument("--beta", type=float, default=0.5)
    l.add_argument("--gamma", type=float, default=0.5)
    l.add_argument("--rows", default="uniform:36",
                   help="uniform:N, focusing:N[:base] or explicit comma list of image rows")
    l.add_argument("--img-h", type=int, default=590)
    l.add_argument("--cut-height", type=int, default=270)
    l.set_defaults(func=cmd_loss)

    g = sub.add_parser("gen-synth", help="write a seeded synthetic gt/pred dataset")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--images", type=int, default=200)
    g.add_argument("--perturb", type=float, default=0.0)
    g.add_argument("--lanes", default="2,4", help="min,max lanes per image")
    g.add_argument("--out-dir", required=True)
    g.set_defaults(func=cmd_gen_synth)

    c = sub.add_parser("coordmaps", help="dump normalized coordinate maps")
    c.add_argument("--w", type=int, required=True)
    c.add_argument("--h", type=int, required=True)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_coordmaps)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DatasetError as e:
        log.error("%s", e)
        return EXIT_DATASET
    except (LaneKitError, ValueError, OSError) as e:
        log.error("%s", e)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
