"""Compare the compiled and numpy kernel backends.

Times each row kernel on a 128 x 128 image worth of rows, then a full
training step (loss + gradients) on the bundled pair at 128 px.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from dirichlet_style import bundled_pair, imageio, kernels, losses, model, pipeline
from dirichlet_style.config import TrainConfig

ROWS = 128 * 128


def kernel_cases(r):
    v = r.uniform(0.01, 0.99, (ROWS, 10))
    s = model.stick_break(v)
    g10, g_rows = r.normal(size=(ROWS, 10)), r.normal(size=ROWS)
    x3 = r.normal(size=(ROWS, 3))
    return {
        "stick_break_forward": (v,),
        "stick_break_backward": (v, g10),
        "row_entropies": (s,),
        "row_entropies_backward": (s, g_rows),
        "row_norms": (x3,),
        "row_norms_backward": (x3, g_rows),
    }


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the numpy backend is available")
    cases = kernel_cases(np.random.default_rng(0))

    content, style = bundled_pair()
    cfg = TrainConfig(train_max_side=128)
    x_c, _ = pipeline.preprocess(imageio.resize_max_side(content, 128))
    x_s, _ = pipeline.preprocess(imageio.resize_max_side(style, 128))
    params = model.init_params(0)

    timings = {}
    for name in backends:
        kernels.use_backend(name)
        row = {}
        for fn, fn_args in cases.items():
            row[fn] = best_of(lambda: getattr(kernels, fn)(*fn_args), args.repeat, 20)
        row["train step"] = best_of(lambda: losses.loss_and_grads(params, x_c, x_s, cfg), args.repeat, 3)
        timings[name] = row

    header = f"{'kernel':<24}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for fn in timings[backends[0]]:
        line = f"{fn:<24}" + "".join(f"{timings[b][fn] * 1e3:>10.3f}ms" for b in backends)
        if len(backends) == 2:
            line += f"{timings['python'][fn] / timings['cython'][fn]:>9.2f}x"
        print(line)


if __name__ == "__main__":
    main()
