"""An inner fibration that is not flat, and the contractibility engine behind the test."""
from qcatfib.contractible import is_weakly_contractible
from qcatfib.core import boundary, standard_simplex
from qcatfib.corpus import flatness_counterexample
from qcatfib.fibrations import check_fibration
from qcatfib.flatness import is_flat

p = flatness_counterexample()
print("inner:", check_fibration(p, "inner", 3).status)
v = is_flat(p, 3)
print("flat:", v.status)
print("factorization space evidence:", v.witness.verdict.evidence["kind"])
print("witness replays:", v.witness.replay())

for name, X in [("simplex 3", standard_simplex(3)), ("boundary of simplex 2", boundary(2)[0])]:
    c = is_weakly_contractible(X)
    print(f"{name}: {c.status} via {c.evidence['kind']}")
