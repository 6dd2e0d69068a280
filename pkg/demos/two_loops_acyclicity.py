"""Exactness of the complex for two loops, read off from condition (W).

For each degree we list the sizes of the partition classes, check the
conditions, and compare the kernel dimension with the number of arrow-type
vectors in the closed part of the window.
"""
from leavitt_complex import build_window, parse_quiver
from leavitt_complex.complex import (check_condition_W, delta_partition, verify_acyclicity,
                                     verify_decomposition)

q = parse_quiver("""
quiver two_loops
vertex 1
arrow a1 : 1 -> 1 associated
arrow a2 : 1 -> 1
""")

w = build_window(q, -2, 2, 4)
print("dimensions:", w.dimensions())
for l in w.degrees:
    f, part = delta_partition(w, l)
    cert = check_condition_W(f, part)
    print(f"l={l:>2}  |B0|={len(part.B0):>3} |B1|={len(part.B1):>3} |B2|={len(part.B2):>2}"
          f"  rank={cert.dimensions['rank']:>3} kernel={cert.dimensions['kernel']:>3}  {cert.status}")

print("acyclicity:", verify_acyclicity(w).status)
dec = verify_decomposition(w)
print("cokernel splits into diagonals:", dec.status)
for l in w.degrees:
    print(f"  l={l:>2}", dec.dimensions[f"diagonals_{l}"])
