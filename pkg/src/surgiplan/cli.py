"""Command line driver.

Verbs: info, slice, render, reach, simulate, serve. Machine-readable JSON
goes to stdout (indented behind --pretty); diagnostics carry the engine
error name verbatim. Exit codes: 0 success, 1 usage error, 2 engine error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .camera import Camera
from .errors import EngineError
from .mip import ClipSet, render_mip
from .plan import plan_reach, simulate_insertion
from .robot_config import load_robot_config_file
from .scene import load_scene
from .slices import extract_slice
from .transfer import ValueWindow
from .volume import parse_nrrd


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="surgiplan")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.add_argument("--pretty", action="store_true")
        return p

    p = add("info", help="print volume sizes/type/range as JSON")
    p.add_argument("--volume", required=True)

    p = add("slice", help="write one windowed slice as PNG")
    p.add_argument("--volume", required=True)
    p.add_argument("--plane", required=True,
                   choices=["axial", "coronal", "sagittal"])
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--out", required=True)

    p = add("render", help="write a MIP rendering as PNG")
    p.add_argument("--volume", required=True)
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--camera", help="camera JSON file (default: auto-framed)")
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--step", type=float)
    p.add_argument("--sampling", choices=["trilinear", "nearest"],
                   default="trilinear")

    p = add("reach", help="plan reach-to-target; print the feasibility report")
    p.add_argument("--scene", required=True)
    p.add_argument("--robot-config", action="append", default=[])
    p.add_argument("--robot-id", required=True)
    p.add_argument("--trocar", required=True)
    p.add_argument("--target", required=True)

    p = add("simulate", help="write an insertion trajectory as JSON")
    p.add_argument("--scene", required=True)
    p.add_argument("--robot-config", action="append", default=[])
    p.add_argument("--robot-id", required=True)
    p.add_argument("--trocar", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--out", required=True)

    p = add("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")

    return parser


def _emit(doc, pretty: bool):
    if pretty:
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        print(json.dumps(doc, sort_keys=True))


def _read_volume(path):
    with open(path, "rb") as fh:
        return parse_nrrd(fh.read())


def _auto_camera(volume, width, height) -> Camera:
    nx, ny, nz = volume.sizes
    corners = []
    for i in (-0.5, nx - 0.5):
        for j in (-0.5, ny - 0.5):
            for k in (-0.5, nz - 0.5):
                corners.append(volume.map.index_to_world((i, j, k)))
    import numpy as np
    corners = np.array(corners)
    lo, hi = corners.min(axis=0), corners.max(axis=0)
    center = (lo + hi) / 2.0
    span = float((hi - lo).max())
    eye = center + np.array([0.0, 0.0, span * 1.5 + 1.0])
    return Camera(kind="orthographic", eye=tuple(eye), look_at=tuple(center),
                  up=(0.0, 1.0, 0.0), width=width, height=height,
                  ortho_width=span * 1.05 + 1e-6)


def _load_scene_file(args):
    from .robot_config import default_registry
    models = default_registry()
    for path in args.robot_config:
        model = load_robot_config_file(path)
        models[model.name] = model
    with open(args.scene, "rb") as fh:
        return load_scene(fh.read(), models=models)


def _run(args) -> int:
    if args.verb == "info":
        volume = _read_volume(args.volume)
        lo, hi = volume.value_range()
        _emit({
            "sizes": list(volume.sizes),
            "type": volume.header.scalar_kind,
            "value_range": [lo, hi],
        }, args.pretty)
        return 0

    if args.verb == "slice":
        volume = _read_volume(args.volume)
        image = extract_slice(volume, args.plane, args.index,
                              ValueWindow(args.lo, args.hi))
        with open(args.out, "wb") as fh:
            fh.write(image.to_png())
        _emit({"out": args.out, "width": image.width,
               "height": image.height}, args.pretty)
        return 0

    if args.verb == "render":
        volume = _read_volume(args.volume)
        if args.camera:
            with open(args.camera, "r", encoding="utf-8") as fh:
                cam = Camera.from_dict(json.load(fh))
        else:
            cam = _auto_camera(volume, args.width, args.height)
        image = render_mip(volume, cam, ValueWindow(args.lo, args.hi),
                           clips=ClipSet(), step=args.step,
                           sampling=args.sampling)
        with open(args.out, "wb") as fh:
            fh.write(image.to_png())
        _emit({"out": args.out, "width": image.width,
               "height": image.height}, args.pretty)
        return 0

    if args.verb == "reach":
        scene = _load_scene_file(args)
        report = plan_reach(scene, args.robot_id, args.trocar, args.target)
        _emit(report.to_dict(), args.pretty)
        return 0

    if args.verb == "simulate":
        scene = _load_scene_file(args)
        trajectory = simulate_insertion(scene, args.robot_id, args.trocar,
                                        args.target, args.steps)
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(trajectory.to_dict(), fh)
        _emit({"out": args.out,
               "samples": len(trajectory.samples)}, args.pretty)
        return 0

    if args.verb == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0

    return 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _run(args)
    except EngineError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"FileNotFound: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
