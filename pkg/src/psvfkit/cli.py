"""Command line front end.

Every subcommand writes delimited output (CSV, JSONL or DOT) into the
output directory and, where a picture makes sense, a PNG next to it;
``--no-figure`` suppresses the pictures.  A JSON config file may supply
any long option of the chosen subcommand; flags given on the command
line override the file.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import dimension, flow, symbolic, tent, transfer, verify
from .errors import PsvfkitError
from .model import build_petal_system, build_zk


def _floats(text: str) -> list[float]:
    return [float(p) for p in text.split(",") if p.strip() != ""]


def _beta_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("beta grid must look like lo:hi:step")
    lo, hi, step = (float(p) for p in parts)
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("need lo <= hi and step > 0")
    return np.arange(lo, hi + 1e-9, step)


def _build(args):
    if args.family == "zk":
        return build_zk(args.k)
    return build_petal_system(args.k)


def _policy(args):
    if args.policy == "right":
        return flow.ALWAYS_RIGHT
    if args.policy == "left":
        return flow.ALWAYS_LEFT
    if args.policy == "prescribed":
        if not args.symbols:
            raise PsvfkitError("--symbols is required with --policy prescribed")
        return flow.Prescribed(int(s) for s in _floats(args.symbols))
    if args.seed is None:
        raise PsvfkitError("--seed is required with --policy random")
    if args.family == "petal":
        if not args.weights:
            raise PsvfkitError("--weights is required for a random petal policy")
        return flow.RandomWeighted(weights=tuple(_floats(args.weights)))
    return flow.RandomWeighted(p1=args.p1, p2=args.p2)


def _start_point(args, psvf):
    if args.x0 is not None:
        vals = _floats(args.x0)
        if len(vals) != 2:
            raise PsvfkitError("--x0 must be 'x,y'")
        return tuple(vals)
    if args.x is not None:
        y = float(psvf.curve(args.x))
        return (args.x, y if args.branch == "upper" else -y)
    if psvf.family == "petal":
        return (0.0, 0.0)
    return (-(args.k - 1) / 2.0, 0.0)   # west crossing station, forced east


def _out(args, name: str) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return os.path.join(args.out_dir, name)


def _simulate(args):
    psvf = _build(args)
    traj = flow.integrate(psvf, _start_point(args, psvf), args.T, dt=args.dt,
                          policy=_policy(args), seed=args.seed)
    flow.save_trajectory_csv(traj, _out(args, "trajectory.csv"))
    flow.save_events_jsonl(traj, _out(args, "events.jsonl"))
    if not args.no_figure:
        from . import plots
        plots.plot_trajectory(traj, _out(args, "trajectory.png"))
    fx, fy = traj.points[-1]
    print(f"{len(traj.times)} samples, {len(traj.events)} events, "
          f"final point ({fx:.6f}, {fy:.6f})")
    return traj


def _itinerary(args):
    traj = _simulate(args)
    it = symbolic.itinerary(traj)
    with open(_out(args, "itinerary.csv"), "w") as fh:
        fh.write("time,symbol\n")
        for i, s in enumerate(it.symbols):
            fh.write(f"{it.base + i},{s}\n")
    print("itinerary:", " ".join(str(s) for s in it.symbols))


def _graph_of(args) -> symbolic.TransitionGraph:
    if args.hub:
        return symbolic.golden_mean_graph(args.hub)
    if args.family == "petal":
        return symbolic.petal_transition_graph(args.k)
    return symbolic.zk_transition_graph(args.k)


def _graph(args):
    g = _graph_of(args)
    with open(_out(args, "graph.dot"), "w") as fh:
        fh.write(g.to_dot() + "\n")
    with open(_out(args, "adjacency.csv"), "w") as fh:
        fh.write(",".join(g.labels) + "\n")
        for row in g.matrix:
            fh.write(",".join(str(v) for v in row) + "\n")
    ent = transfer.graph_entropy(g)
    print(f"{g.size} states, entropy {ent:.9f}")
    if args.words:
        count = symbolic.admissible_word_count(g, args.words)
        rate = math.log(count) / args.words
        print(f"{count} admissible words of length {args.words}, "
              f"growth rate {rate:.6f}")


def _pressure(args):
    if args.source == "empirical":
        psvf = _build(args)
        if args.seed is None:
            raise PsvfkitError("--seed is required for an empirical pressure curve")
        weights = tuple(_floats(args.weights)) if args.weights else None

        def builder(beta):
            return transfer.empirical_matrix(
                psvf, beta, args.n_samples, seed=args.seed,
                p1=args.p1, p2=args.p2, weights=weights)

        kind = f"empirical {args.family} k={args.k}"
    elif args.family == "petal":
        if not args.weights:
            raise PsvfkitError("--weights is required for petal pressure")
        w = _floats(args.weights)
        builder = lambda beta: transfer.petal_matrix(w, beta)
        kind = f"petal k={args.k}"
    else:
        if args.p1 is None:
            raise PsvfkitError("--p1 is required for chain pressure")
        builder = lambda beta: transfer.zk_matrix(args.k, args.p1, args.p2, beta)
        kind = f"chain k={args.k} p1={args.p1} p2={args.p2}"
    curve = transfer.pressure_curve(builder, args.betas, kind)
    transfer.save_pressure_csv(curve, _out(args, "pressure.csv"))
    if not args.no_figure:
        from . import plots
        plots.plot_pressure(curve, _out(args, "pressure.png"))
    i0 = int(np.argmin(np.abs(curve.betas)))
    i1 = int(np.argmin(np.abs(curve.betas - 1.0)))
    print(f"pressure at beta={curve.betas[i0]:g}: {curve.pressures[i0]:.9f}; "
          f"at beta={curve.betas[i1]:g}: {curve.pressures[i1]:.9f}")


def _entropy(args):
    if args.hub:
        label, g = f"hub-{args.hub}", symbolic.golden_mean_graph(args.hub)
    else:
        g = (symbolic.petal_transition_graph(args.k) if args.family == "petal"
             else symbolic.zk_transition_graph(args.k))
        label = f"{args.family}-k{args.k}"
    r = transfer.spectral_radius(g.adjacency()).radius
    # cross check: finite word counts should grow at nearly the same rate
    count = symbolic.admissible_word_count(g, args.words)
    rate = math.log(count) / args.words
    with open(_out(args, "entropy.csv"), "w") as fh:
        fh.write("label,radius,entropy,word_length,word_count,word_rate\n")
        fh.write(f"{label},{r:.12g},{math.log(r):.12g},"
                 f"{args.words},{count},{rate:.12g}\n")
    print(f"{label}: radius {r:.9f}, entropy {math.log(r):.9f}")
    print(f"{count} admissible words of length {args.words}, "
          f"growth rate {rate:.6f}")


def _tent(args):
    h_lap = tent.entropy_lap(args.alpha, args.n_lo, args.n_hi)
    h_sep = tent.entropy_separated(args.alpha, args.n, args.epsilon)
    target = math.log(args.alpha)
    with open(_out(args, "tent.csv"), "w") as fh:
        fh.write("alpha,entropy_lap,entropy_separated,log_alpha\n")
        fh.write(f"{args.alpha:.12g},{h_lap:.12g},{h_sep:.12g},{target:.12g}\n")
    if not args.no_figure:
        from . import plots
        ns = range(args.n_lo, args.n_hi + 1)
        counts = [tent.lap_count(args.alpha, n) for n in ns]
        plots.plot_laps(args.alpha, list(ns), counts, _out(args, "laps.png"))
    print(f"alpha={args.alpha}: lap slope {h_lap:.6f}, separated {h_sep:.6f}, "
          f"log alpha {target:.6f}")


def _dimension(args):
    targets = _floats(args.s)
    first_est = None
    with open(_out(args, "dimension.csv"), "w") as fh:
        fh.write("s,box_dimension,r_squared,alpha,entropy_lap\n")
        for s in targets:
            res = dimension.check_dimension_entropy(s, depth=args.depth,
                                                    strict=False)
            fh.write(f"{s:.12g},{res.dimension:.12g},{res.r_squared:.12g},"
                     f"{res.alpha:.12g},{res.entropy:.12g}\n")
            verdict = ("ok" if res.dimension_error <= 0.02
                       and res.entropy_error <= 0.02 else "MISMATCH")
            print(f"s={s:.6f}: dimension {res.dimension:.6f}, "
                  f"entropy {res.entropy:.6f} [{verdict}]")
            if first_est is None:
                first_est = dimension.box_dimension(
                    dimension.cantor_for_dimension(s, args.depth))
    if not args.no_figure and first_est is not None:
        from . import plots
        plots.plot_boxes(first_est, _out(args, "boxes.png"))


def _verify(args):
    results = verify.run_all(args.only)
    for res in results:
        print(verify.format_line(res))
    if not all(r.passed for r in results):
        sys.exit(1)


def _add_family(sp, default_k=3):
    sp.add_argument("--family", choices=("zk", "petal"), default="zk")
    sp.add_argument("--k", type=int, default=default_k)


def _add_sim(sp):
    _add_family(sp)
    sp.add_argument("--x0", help="start point 'x,y'")
    sp.add_argument("--x", type=float, help="start abscissa on the curve")
    sp.add_argument("--branch", choices=("upper", "lower"), default="upper")
    sp.add_argument("--T", type=float, default=20.0)
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--policy",
                    choices=("right", "left", "random", "prescribed"),
                    default="right")
    sp.add_argument("--symbols", help="comma separated prescribed choices")
    sp.add_argument("--p1", type=float)
    sp.add_argument("--p2", type=float)
    sp.add_argument("--weights", help="comma separated petal jump weights")
    sp.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="psvfkit",
        description="piecewise smooth planar systems: simulation, symbolic "
                    "dynamics, pressure, entropy and dimension")
    ap.add_argument("--version", action="version", version="psvfkit 0.1.0")
    sub = ap.add_subparsers(dest="command", required=True)

    common = {"out_dir": dict(flags="--out-dir",
                              default=os.environ.get("PSVFKIT_OUT", "."),
                              help="output directory"),
              "no_figure": dict(flags="--no-figure", action="store_true",
                                help="skip PNG output"),
              "config": dict(flags="--config",
                             help="JSON file of option defaults")}

    def new_sub(name, fn, **kw):
        sp = sub.add_parser(name, **kw)
        sp.set_defaults(fn=fn)
        for spec in common.values():
            spec = dict(spec)
            flags = spec.pop("flags")
            sp.add_argument(flags, **spec)
        return sp

    sp = new_sub("simulate", _simulate, help="integrate one trajectory")
    _add_sim(sp)

    sp = new_sub("itinerary", _itinerary,
                 help="integrate and read off the symbol sequence")
    _add_sim(sp)

    sp = new_sub("graph", _graph, help="emit the transition graph")
    _add_family(sp)
    sp.add_argument("--hub", type=int,
                    help="use the hub-and-spokes graph on this many states")
    sp.add_argument("--words", type=int,
                    help="also count admissible words of this length")

    sp = new_sub("pressure", _pressure, help="pressure along a beta grid")
    _add_family(sp)
    sp.add_argument("--source", choices=("analytic", "empirical"),
                    default="analytic")
    sp.add_argument("--p1", type=float)
    sp.add_argument("--p2", type=float)
    sp.add_argument("--weights")
    sp.add_argument("--beta", dest="betas", type=_beta_grid,
                    default=_beta_grid("0:2:0.1"), metavar="LO:HI:STEP")
    sp.add_argument("--n-samples", type=int, default=20000)
    sp.add_argument("--seed", type=int)

    sp = new_sub("entropy", _entropy, help="graph entropy from the radius")
    _add_family(sp)
    sp.add_argument("--hub", type=int)
    sp.add_argument("--words", type=int, default=24,
                    help="word length for the growth rate cross check")

    sp = new_sub("tent", _tent, help="tent map entropy estimates")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--n-lo", type=int, default=10)
    sp.add_argument("--n-hi", type=int, default=22)
    sp.add_argument("--n", type=int, default=18)
    sp.add_argument("--epsilon", type=float, default=0.1)

    sp = new_sub("dimension", _dimension,
                 help="box dimension of target Cantor sets plus the entropy "
                      "cross check")
    sp.add_argument("--s", default="0.4,0.5,0.6")
    sp.add_argument("--depth", type=int, default=14)

    sp = new_sub("verify", _verify, help="run the acceptance checks")
    sp.add_argument("--only", help="substring filter on check names")
    return ap


def _inject_config(argv: list[str]) -> list[str]:
    """Turn --config JSON entries into flags placed before the user's own
    flags, so explicit flags win."""
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
        elif tok.startswith("--config="):
            path = tok.split("=", 1)[1]
    if path is None or not argv:
        return argv
    with open(path) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise PsvfkitError("config must be a JSON object")
    extra: list[str] = []
    for key, val in cfg.items():
        flag = "--" + str(key).replace("_", "-")
        if isinstance(val, bool):
            if val:
                extra.append(flag)
        elif val is not None:
            extra.extend([flag, str(val)])
    return [argv[0]] + extra + argv[1:]


def main(argv=None) -> None:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _inject_config(argv)
    args = build_parser().parse_args(argv)
    try:
        args.fn(args)
    except PsvfkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)


if __name__ == "__main__":
    main()
