"""Compare the compiled and pure-Python matching kernels.

    python benchmarks/bench_kernels.py [--worlds 2000] [--repeat 5]
"""
import argparse
import random
import timeit

from relgrid import _pykernels
from relgrid.commands import Pattern, sample_commands
from relgrid.distractors import GeneratorConfig, generate_corpus
from relgrid.graphs import candidate_masks, command_to_graph, world_to_graph

try:
    from relgrid import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def workload(n_worlds: int):
    cases = []
    per = max(1, n_worlds // 300)
    for pattern in (Pattern.ONE_REL, Pattern.TWO_REL, Pattern.THREE_REL):
        examples, _ = generate_corpus(pattern, GeneratorConfig(worlds_per_command=per, seed=3), 100)
        for ex in examples:
            gw = world_to_graph(ex.world)
            gc = command_to_graph(ex.command)
            objs = ex.world.objects
            columns = (
                bytes(o.row for o in objs), bytes(o.col for o in objs),
                bytes(list(type(o.color)).index(o.color) for o in objs),
                bytes(list(type(o.shape)).index(o.shape) for o in objs),
                bytes(o.size for o in objs), bytes(o.is_box for o in objs),
            )
            cases.append((columns, gw.n, gw.matrix, candidate_masks(gc, ex.world), gc.parent, gc.edge_bits))
    random.Random(0).shuffle(cases)
    return cases


def run(backend, cases):
    def matrices():
        for columns, *_ in cases:
            backend.relation_matrix(*columns)

    def embeddings():
        for _, n, rel, cand, parent, bits in cases:
            backend.embed_roots(n, rel, cand, parent, bits)

    return matrices, embeddings


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--worlds", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    cases = workload(args.worlds)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled kernels unavailable; timing the pure-Python backend only")
    results = {}
    for name, backend in backends.items():
        for label, fn in zip(("relation_matrix", "embed_roots"), run(backend, cases)):
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            results[(name, label)] = best
    print(f"{len(cases)} command/world pairs, best of {args.repeat}")
    print(f"{'kernel':<16} {'backend':<8} {'us/pair':>9} {'speedup':>8}")
    for label in ("relation_matrix", "embed_roots"):
        base = results[("python", label)]
        for name in backends:
            t = results[(name, label)]
            print(f"{label:<16} {name:<8} {1e6 * t / len(cases):>9.2f} {base / t:>7.1f}x")


if __name__ == "__main__":
    main()
