"""Right Kan extension of a cocartesian fibration along a functor, built as a space of sections.

The span B <- O(B) x_B A -> A has every edge marked. Pulling a cocartesian
fibration p over A through it gives a cocartesian fibration over B.
"""
from qcatfib.core import identity_map
from qcatfib.corpus import simplex, std_face, to_point
from qcatfib.fibrations import is_cocartesian_fibration
from qcatfib.patterns import audit_cor_6_2_1, check_cor_6_2_1, prop_6_5_span

for name, phi in [("face 02 into simplex 2", std_face(2, (0, 2))),
                  ("simplex 1 to a point", to_point(simplex(1)))]:
    pi, rho, E = prop_6_5_span(phi)
    report = audit_cor_6_2_1(pi, rho, E, 3)
    print(f"{name}: span hypotheses hold: {report.all_hold}")
    p = identity_map(phi.source)
    fc, verdict, crit = check_cor_6_2_1(pi, rho, E, p, 3)
    print(f"  Z has counts {fc.total.counts}, cocartesian over B: {verdict.status},"
          f" edge criterion: {crit.status}")
    assert is_cocartesian_fibration(fc.projection, 3).holds
