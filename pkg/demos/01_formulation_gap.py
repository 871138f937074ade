"""Where the measurement signal comes from: two algebraically identical ways
of writing a vector field can round differently in IEEE-754 doubles.

The Lorenz first component can be written -10*y1 + 10*y2 or 10*(y2 - y1);
the Duffing cubic as x1**3 (one libm pow call) or x1*x1*x1 (two multiplies).
In exact arithmetic each pair is the same function.  In doubles they land
one ulp apart on a sizable fraction of states, and that per-step ulp is the
seed the lower-bound-error experiments amplify.
"""

import random
import struct

from synclbe import eval_duffing, eval_lorenz


def bits(x):
    return struct.unpack("<q", struct.pack("<d", x))[0]


def main():
    print("Sample states where the two Lorenz formulations disagree:")
    print(f"{'y1':>10} {'y2':>10}   {'-10*y1+10*y2':>22} {'10*(y2-y1)':>22}  ulp gap")
    rng = random.Random(4)
    shown = 0
    while shown < 5:
        y = (rng.uniform(-20, 20), rng.uniform(-25, 25), rng.uniform(0, 45))
        a = eval_lorenz(y, "A")[0]
        b = eval_lorenz(y, "B")[0]
        if a != b:
            print(f"{y[0]:10.4f} {y[1]:10.4f}   {a!r:>22} {b!r:>22}  {abs(bits(a)-bits(b))}")
            shown += 1

    n = 100000
    lorenz_diff = duffing_diff = 0
    for _ in range(n):
        y = (rng.uniform(-20, 20), rng.uniform(-25, 25), rng.uniform(0, 45))
        if eval_lorenz(y, "A")[0] != eval_lorenz(y, "B")[0]:
            lorenz_diff += 1
        x = (rng.uniform(-2, 2), rng.uniform(-2, 2))
        t = rng.uniform(0, 30)
        if eval_duffing(x, t, variant="A") != eval_duffing(x, t, variant="B"):
            duffing_diff += 1
    print(f"\nOver {n} random states:")
    print(f"  Lorenz  variants differ on {100 * lorenz_diff / n:.1f}% of states")
    print(f"  Duffing variants differ on {100 * duffing_diff / n:.1f}% of states")
    print("\nEvery individual difference is at most a few ulps; chaos does the rest.")


if __name__ == "__main__":
    main()
