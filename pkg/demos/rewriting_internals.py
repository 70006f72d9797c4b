"""Critical pairs and completion for the built-in rewriting systems.

The sphere systems are already confluent; the torus systems pick up a few
derived rules before their normal forms become order-independent on the
identities the package verifies.
"""

from arcalg import RewriteSystem, Surface, algebra_for, complete, critical_pairs
from arcalg.freealg import word_str


def main():
    for surface in (Surface(0, 2), Surface(0, 3), Surface(1, 0), Surface(1, 1)):
        alg = algebra_for(surface)
        raw = RewriteSystem(alg.arity, alg.rules)
        print(f"== {surface} ==")
        print(f"presentation rules: {len(alg.rules)}")
        pairs = critical_pairs(raw, 6)
        print(f"critical pairs up to length 6: {len(pairs)}")
        for cp in pairs[:3]:
            print(f"  ambiguity {word_str(cp.word)}")
        done, report = complete(raw, 6)
        print(f"completed system: {len(done.rules)} rules "
              f"({len(report.added_rules)} added, {len(report.failures)} failures)")
        for rule in report.added_rules:
            print(f"  added {rule}")
        print()


if __name__ == "__main__":
    main()
