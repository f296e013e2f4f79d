"""Shot-count convergence on the kite graph and the unit-constant cost sweep.

Run with ``python demos/convergence_and_cost.py``.
"""
from qsubgraph.analysis import convergence_study, cost_sweep, crossover, log_grid
from qsubgraph.graph import builtin_graph


def main():
    study = convergence_study(builtin_graph("kite"), 2, [10**3, 10**4, 10**5, 10**6], range(10))
    print("shots      mean error   p25        p75")
    for row in study.table():
        print(f"{row['shots']:<10} {row['mean']:<12.5f} {row['p25']:<10.5f} {row['p75']:.5f}")
    print(f"log-log slope {study.slope:.3f} (shot noise alone gives -0.5)\n")

    for eps in (1.0, 1 / 64):
        rows = cost_sweep(log_grid(2, 1e6, 2), xs=(1, 2, 3), eps=eps)
        print(f"eps={eps:g}: quantum cheaper than brute force from N =",
              ", ".join(f"{crossover(rows, x)} (x={x})" for x in (1, 2, 3)))


if __name__ == "__main__":
    main()
