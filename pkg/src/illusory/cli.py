"""Command-line driver: scene generation, supervised runs, minimality
verification and contour metrics.

Every output file embeds the parameter set that produced it, and a rerun
with the same arguments (seed included) reproduces every byte.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import energy, extraction, formats, geometry, levelset, scene


def _scene_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--size", type=int, default=128, help="grid size (cells)")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--side", type=float, default=None)
    p.add_argument("--mouth-deg", type=float, default=None)
    p.add_argument("--gap", type=float, default=None)
    p.add_argument("--arc-vertices", type=int, default=64)


def _spec_from_args(kind: str, args) -> scene.SceneSpec:
    return scene.SceneSpec(kind=kind, size=args.size, radius=args.radius,
                           side=args.side, mouth_deg=args.mouth_deg,
                           gap=args.gap, arc_vertices=args.arc_vertices)


def _params_dict(prm: levelset.EvolutionParams, seed: int) -> dict:
    return dict(alpha=prm.alpha, beta=prm.beta, lam=prm.lam, sigma=prm.sigma,
                dt=prm.dt, eps_reg=prm.eps_reg, border_margin=prm.border_margin,
                clamp=prm.clamp, max_steps=prm.max_steps,
                stop_window=prm.stop_window, stop_threshold=prm.stop_threshold,
                frame_interval=prm.frame_interval, seed=seed)


def _params_line(d: dict) -> str:
    return " ".join(f"{k}={v!r}" for k, v in sorted(d.items()))


def cmd_generate(args) -> int:
    spec = _spec_from_args(args.kind, args)
    config, ideal = scene.generate(spec)
    os.makedirs(args.out, exist_ok=True)
    meta = dict(kind=spec.kind, size=spec.size)
    formats.write_scene(os.path.join(args.out, "scene.txt"), config, meta)
    u = scene.rasterize(config, spec.size, spec.size)
    formats.write_pgm(os.path.join(args.out, "scene.pgm"), u,
                      comment=f"kind={spec.kind} size={spec.size}")
    if ideal is not None:
        formats.write_contour(os.path.join(args.out, "ideal.txt"), ideal, meta)
    print(f"wrote scene files to {args.out}")
    return 0


def _evolution_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=100.0)
    p.add_argument("--sigma", type=float, default=2.0)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--eps-reg", type=float, default=1e-4)
    p.add_argument("--border-margin", type=int, default=4)
    p.add_argument("--max-steps", type=int, default=20000)
    p.add_argument("--stop-window", type=int, default=200)
    p.add_argument("--stop-threshold", type=float, default=0.5)
    p.add_argument("--frame-interval", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--config", default=None,
                   help="structured-text params file; overrides flags")


def _apply_config_file(prm_kwargs: dict, path: str) -> dict:
    with open(path) as f:
        root = formats.parse(f.read())
    params = root.get("params")
    if params is None:
        raise formats.FormatError("config file needs a params block")
    for key, value in params.items:
        k = {"lambda": "lam"}.get(key, key)
        if k in prm_kwargs:
            prm_kwargs[k] = type(prm_kwargs[k])(value) \
                if prm_kwargs[k] is not None else value
        elif k == "seed":
            prm_kwargs["seed"] = int(value)
    return prm_kwargs


def _build_params(args) -> tuple[levelset.EvolutionParams, int]:
    kw = dict(alpha=args.alpha, beta=args.beta, lam=args.lam, sigma=args.sigma,
              dt=args.dt, eps_reg=args.eps_reg,
              border_margin=args.border_margin, max_steps=args.max_steps,
              stop_window=args.stop_window, stop_threshold=args.stop_threshold,
              frame_interval=args.frame_interval, seed=args.seed)
    if args.config:
        kw = _apply_config_file(kw, args.config)
    seed = kw.pop("seed")
    return levelset.EvolutionParams(**kw), seed


def cmd_run(args) -> int:
    if (args.scene is None) == (args.kind is None):
        print("run needs exactly one of --scene or --kind", file=sys.stderr)
        return 2
    prm, seed = _build_params(args)
    ideal = None
    if args.kind is not None:
        spec = _spec_from_args(args.kind, args)
        config, ideal = scene.generate(spec)
        size = spec.size
    else:
        config = formats.read_scene(args.scene)
        size = int(round(config.domain[2]))
    if args.ideal:
        ideal = formats.read_contour(args.ideal)

    os.makedirs(args.out, exist_ok=True)
    pdict = _params_dict(prm, seed)
    pline = _params_line(pdict)
    fields = scene.build_fields(config, size, prm.alpha, prm.beta,
                                prm.lam, prm.sigma)

    def frame_cb(state):
        k = state.step_index
        formats.write_pgm(
            os.path.join(args.out, f"frame_{k:06d}.pgm"),
            formats.overlay_field(fields.u, state.phi),
            comment=pline)
        formats.write_raw_field(
            os.path.join(args.out, f"phi_{k:06d}.raw"), state.phi)

    t0 = time.perf_counter()
    try:
        result = levelset.run(fields, prm, frame_cb)
    except levelset.EvolutionError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - t0

    formats.write_run_csv(os.path.join(args.out, "log.csv"),
                          result.history, pline)
    formats.write_raw_field(os.path.join(args.out, "phi_final.raw"),
                            result.state.phi)
    with open(os.path.join(args.out, "phi_final.raw.meta.txt"), "w") as f:
        f.write(f"# {pline}\n")

    extracted = extraction.zero_contour(result.state.phi)
    lines = [f"verdict {result.verdict}",
             f"steps {result.steps}",
             f"dt_used {result.dt_used!r}",
             f"dt_retries {result.dt_retries}",
             f"elapsed_s {elapsed:.3f}",
             f"contours {len(extracted.contours)}",
             f"fragments {len(extracted.fragments)}"]
    if result.history.energy:
        lines.append(f"final_energy {result.history.energy[-1]!r}")
    if extracted.contours:
        final = extracted.contours[0]
        formats.write_contour(os.path.join(args.out, "final_contour.txt"),
                              final, pdict)
        real_len, imag_len, _ = extraction.classify(final, config)
        lines.append(f"final_real_length {real_len!r}")
        lines.append(f"final_imaginary_length {imag_len!r}")
        if ideal is not None:
            d = extraction.hausdorff(final, ideal)
            lines.append(f"hausdorff_to_ideal {d!r}")
        formats.write_svg_overlay(os.path.join(args.out, "overlay.svg"),
                                  config, extracted.contours)
    if result.history.supervision_violations:
        lines.append("supervision_violations "
                     + str(len(result.history.supervision_violations)))
    with open(os.path.join(args.out, "summary.txt"), "w") as f:
        f.write(f"# {pline}\n")
        for line in lines:
            f.write(line + "\n")
    print("\n".join(lines))
    return 0


def cmd_verify(args) -> int:
    config = formats.read_scene(args.scene)
    contour = formats.read_contour(args.contour)
    weights = energy.EnergyWeights(alpha=args.alpha, beta=args.beta)
    report = energy.verify_local_minimum(contour, config, weights,
                                         budget=args.budget, seed=args.seed,
                                         tol=args.tol)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        formats.write_report(os.path.join(args.out, "report.txt"), report)
        formats.write_perturbations_csv(
            os.path.join(args.out, "perturbations.csv"), report)
    print(f"verdict {report.verdict}")
    print(f"critical_ratio {report.critical_ratio!r} "
          f"(r1 {report.r1!r}, r2 {report.r2!r}), weight ratio {report.ratio!r}")
    print(f"samples_tested {report.samples_tested}, "
          f"witnesses {len(report.witnesses)}")
    for w in report.witnesses[:5]:
        print(f"  witness family={w.family} eps={w.eps!r} dE={w.delta_e!r} "
              f"({w.description})")
    return {"local-minimum": 0, "refuted": 2}.get(report.verdict, 3)


def cmd_metrics(args) -> int:
    a = formats.read_contour(args.contour_a)
    b = formats.read_contour(args.contour_b)
    d = extraction.hausdorff(a, b)
    print(f"hausdorff {d!r}")
    print(f"length_a {a.length()!r}")
    print(f"length_b {b.length()!r}")
    if args.scene:
        config = formats.read_scene(args.scene)
        for name, c in (("a", a), ("b", b)):
            real_len, imag_len, _ = extraction.classify(c, config, args.tol)
            print(f"real_length_{name} {real_len!r}")
            print(f"imaginary_length_{name} {imag_len!r}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="illusory",
        description="illusory-contour scenes, supervised level-set runs, "
                    "and local-minimality verification")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write scene, image and ideal contour")
    p_gen.add_argument("kind", choices=[k for k in scene.SCENE_KINDS
                                        if k != "custom"])
    _scene_args(p_gen)
    p_gen.add_argument("--out", required=True)
    p_gen.set_defaults(func=cmd_generate)

    p_run = sub.add_parser("run", help="supervised level-set run")
    p_run.add_argument("--scene", default=None, help="scene file")
    p_run.add_argument("--kind", default=None,
                       choices=[k for k in scene.SCENE_KINDS if k != "custom"])
    _scene_args(p_run)
    p_run.add_argument("--ideal", default=None, help="ideal contour file")
    p_run.add_argument("--out", required=True)
    _evolution_args(p_run)
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="check local minimality of a contour")
    p_ver.add_argument("--contour", required=True)
    p_ver.add_argument("--scene", required=True)
    p_ver.add_argument("--alpha", type=float, default=0.1)
    p_ver.add_argument("--beta", type=float, default=1.0)
    p_ver.add_argument("--budget", type=int, default=500)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--tol", type=float, default=geometry.GEOMETRY_TOL)
    p_ver.add_argument("--out", default=None)
    p_ver.set_defaults(func=cmd_verify)

    p_met = sub.add_parser("metrics", help="compare two contours")
    p_met.add_argument("--contour-a", required=True)
    p_met.add_argument("--contour-b", required=True)
    p_met.add_argument("--scene", default=None)
    p_met.add_argument("--tol", type=float, default=1.0)
    p_met.set_defaults(func=cmd_metrics)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (geometry.GeometryError, scene.SceneError,
            formats.FormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
