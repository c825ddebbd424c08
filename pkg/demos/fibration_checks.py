"""Classify a few small maps and replay the failure witnesses."""
from qcatfib.corpus import maps, slice_fixture
from qcatfib.fibrations import check_fibration, is_cocartesian_fibration

corpus = maps()

# a slice projection is a left fibration
p = slice_fixture()
print("slice projection, left:", check_fibration(p, "left", 3).status)

# an edge over a point is an inner fibration but not a Kan fibration
q = corpus["simplex1_to_point"]
print("edge over point, inner:", check_fibration(q, "inner", 3).status)
v = check_fibration(q, "kan", 3)
print("edge over point, kan:", v.status, "| witness replays:", v.witness.replay())

# a Grothendieck construction whose transport is not functorial
g = corpus["groth_endpoints"]
v = is_cocartesian_fibration(g, 3)
print("groth_endpoints, cocartesian:", v.status, "| witness replays:", v.witness.replay())
