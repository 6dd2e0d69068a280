"""A walk through the smallest example: one vertex with one loop.

Every component of the complex is 2-dimensional, spanned by e z^l and a z^l,
and the algebra acting on the right is the Laurent polynomial ring.
"""
from leavitt_complex import Bimodule, LeavittAlgebra, build_window, parse_quiver
from leavitt_complex.complex import format_element
from leavitt_complex.homology import rho

q = parse_quiver("""
quiver one_loop
vertex 1
arrow a : 1 -> 1
""")

w = build_window(q, -3, 3, 6)
for l in w.degrees:
    basis = w.basis(l)
    images = [format_element(q, w.diff(b)) for b in basis]
    print(f"P^{l:>2}: " + ",  ".join(f"{b} -> {img}" for b, img in zip(basis, images)))

# the algebra: one normal term per degree
B = LeavittAlgebra(q)
for n in range(-3, 4):
    (t,) = B.normal_terms(n, abs(n))
    print(f"degree {n:>2}: {B.format_term(t)}")
print("a^op (a^op)* =", B.format(B.arrow("a") * B.ghost("a")))

# right action: e z(e,e) . a^op moves one step up, with the sign of rho
M = Bimodule(q)
u = M.unit_section()
print("phi(1)        =", format_element(q, u))
print("phi(1) . a^op =", format_element(q, M.act(u, B.arrow("a"))))
r = rho(M, B.arrow("a"))
for b in w.basis(-2)[:1] + w.basis(1)[:1]:
    print(f"rho(a^op)({b}) = {format_element(q, r(b))}")
