"""A tour of the four presented arc algebras.

Walks through normal forms in the algebras of the twice- and thrice-
punctured spheres and of the two torus algebras, and shows that the
boundary loop of the torus collapses to its scalar value.
"""

from arcalg import (
    Surface,
    algebra_for,
    boundary_element,
    generator_alphabet,
    parse_element,
    verify_presentation,
)


def show(alg, text):
    element = parse_element(text, alg.arity, generator_alphabet(alg.surface))
    print(f"  nf({text}) = {alg.nf(element)}")


def main():
    print("== twice-punctured sphere ==")
    alg = algebra_for(Surface(0, 2))
    print(f"generators: {[str(g) for g in alg.generators]}")
    for rule in alg.rules:
        print(f"  rule: {rule}")
    show(alg, "a*a")
    show(alg, "a^5")

    print()
    print("== thrice-punctured sphere ==")
    alg = algebra_for(Surface(0, 3))
    print(f"{len(alg.rules)} rules; sample products:")
    show(alg, "a1*a2")
    show(alg, "a2*a1")
    show(alg, "a1*a1")
    show(alg, "a1*a2*a3")
    print("every word collapses to a scalar multiple of 1, a1, a2 or a3:")
    show(alg, "a3*a1*a2*a1")

    print()
    print("== torus algebras ==")
    for surface in (Surface(1, 0), Surface(1, 1)):
        alg = algebra_for(surface)
        print(f"{surface}: boundary scalar {alg.boundary_scalar}")
        show(alg, "g2*g1")
        boundary = boundary_element(surface)
        print(f"  boundary loop {boundary}")
        print(f"  nf(boundary loop) = {alg.nf(boundary)}")
        g1 = alg.gen(alg.generators[0])
        commutator = alg.nf(boundary * g1 - g1 * boundary)
        print(f"  nf([boundary, g1]) = {commutator}")

    print()
    print("== defining relations hold under normalization ==")
    for surface in (Surface(0, 2), Surface(0, 3), Surface(1, 0), Surface(1, 1)):
        report = verify_presentation(surface)
        status = "all pass" if report.passed else "FAILURES"
        print(f"  {surface}: {len(report.records)} relations, {status}")


if __name__ == "__main__":
    main()
