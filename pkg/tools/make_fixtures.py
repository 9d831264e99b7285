"""Regenerate the bundled fixture corpus under src/homrecomb/fixtures."""

import os
import random

from homrecomb.complexes import complex_from_matrices, format_complex
from homrecomb.linalg import ZZ
from homrecomb.mapping_torus import format_algebra, prime_field, product_algebra, quotient_algebra
from homrecomb.tensor_dga import format_dga, random_filtered_dga

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "homrecomb", "fixtures")


def scenario(name, fiber="M", complexity=4, sh="*:nonvanishes", cycles=("V1",), recombine=None,
             chars=(0, 2, 3, 5), rhos=(), moves=(), files=None, truncation=None):
    out = ["homrecomb-scenario 1", f"id = {name}", "[fiber]", f"id = {fiber}",
           f"complexity = {complexity}", f"sh = {sh}", "[cycles]"]
    out += list(cycles)
    if recombine:
        out.append("[recombine]")
        out += [f"{k} = {v}" for k, v in recombine.items()]
    out.append("[query]")
    out.append("chars = " + " ".join(map(str, chars)))
    if rhos:
        out.append("rhos = " + " ".join(map(str, rhos)))
    if moves:
        out.append("moves = " + "; ".join(moves))
    if files:
        out.append("[files]")
        out += [f"{k} = {v}" for k, v in files.items()]
    if truncation:
        out.append("[truncation]")
        out += [f"{k} = {v}" for k, v in truncation.items()]
    with open(os.path.join(OUT, name + ".scn"), "w") as fh:
        fh.write("\n".join(out) + "\n")


def moore(q, rho=2, n=6):
    return {"rho": rho, "u": "moore", "q": q, "n": n}


def write(name, text):
    with open(os.path.join(OUT, name), "w") as fh:
        fh.write(text)


def main():
    os.makedirs(OUT, exist_ok=True)
    for q in (2, 3, 4, 6, 30):
        scenario(f"selective_q{q}", recombine=moore(q), chars=(0, 2, 3, 5, 7))
    scenario("selective_q6_vanishing_original", sh="*:vanishes", recombine=moore(6))
    scenario("moore_q1_acyclic", recombine=moore(1, rho=3), chars=(0, 2, 3))
    scenario("moore_q35_rho_list", recombine=moore(35, rho=2, n=5), chars=(0, 2, 5, 7),
             rhos=(1, 2, 3, 4))
    scenario("rho_one", recombine=moore(6, rho=1), chars=(0, 2, 3))
    scenario("unknown_original", sh="*:unknown", recombine=moore(6), chars=(0, 2, 3))
    scenario("mixed_original", sh="*:nonvanishes 2:vanishes 3:unknown", recombine=moore(6))
    scenario("two_cycles_q12", cycles=("V1", "V2"), recombine=moore(12, rho=3),
             chars=(0, 2, 3, 5))
    scenario("three_cycles_q10", complexity=7, cycles=("V1", "V2", "V3"),
             recombine=moore(10, rho=2, n=7), chars=(0, 2, 5))
    scenario("four_cycles_q2", complexity=2, cycles=("V1", "V2", "V3", "V4"),
             recombine=moore(2, rho=4), chars=(0, 2))
    scenario("point_plus_circle", recombine={"rho": 2, "u": "point_plus_circle", "n": 4},
             chars=(0, 2, 3), rhos=(1, 2, 3))
    scenario("circle_two_arcs_even", recombine={"rho": 2, "u": "circle_two_arcs", "n": 2},
             chars=(0, 2))
    scenario("circle_two_arcs_odd", recombine={"rho": 3, "u": "circle_two_arcs", "n": 2},
             chars=(0, 2))
    scenario("unknown_complexity", complexity="unknown", recombine=moore(6), chars=(2,))
    scenario("empty_query", recombine=moore(6), chars=())
    scenario("moves_only", cycles=("V1", "V2", "V3"),
             moves=("hurwitz 0 left", "hurwitz 0 right", "stabilize 1 S", "hurwitz 2 left"),
             chars=())
    scenario("recombine_then_moves", recombine=moore(6),
             moves=("hurwitz 0 right", "hurwitz 1 left", "stabilize 3 S", "destabilize 3"),
             chars=(2,))
    scenario("explicit_rp2", recombine={"rho": 2, "u": "explicit", "n": 5},
             chars=(0, 2, 3), files={"complex": "rp2.cx"})
    scenario("with_dga", recombine=moore(6), chars=(2,), files={"dga": "unit_killer.dga"})
    scenario("with_random_dga", chars=(), files={"dga": "random_seed3.dga"},
             truncation={"P": 5})
    scenario("with_table", chars=(), files={"table": "three_thimbles.tbl"})
    scenario("with_families", chars=(), files={"families": "brieskorn_like.fam"})
    scenario("with_algebra", chars=(), files={"algebra": "f3_times_dual.alg"})

    write("unit_killer.dga", "\n".join([
        "dga 1", "ring 2", "field F3", "truncate 6 6",
        "letter y1 1 1 1 1", "letter y2 2 2 1 1", "letter a 1 2 0 2", "letter b 1 2 0 4",
        "y1 -> 1 e1", "y2 -> 1 e2", "b -> 1 y2 a; -1 a y1", ""]))
    write("broken_leibniz.dga", "\n".join([
        "dga 1", "ring 1", "field F2", "truncate 6 6",
        "letter a 1 1 0 3", "letter b 1 1 1 2", "letter c 1 1 0 1",
        "a -> 1 b", "b -> 1 c", ""]))
    write("random_seed3.dga", format_dga(random_filtered_dga(random.Random(3))))
    write("random_seed8.dga", format_dga(random_filtered_dga(random.Random(8))))
    write("three_thimbles.tbl", "\n".join([
        "3", "2 1 1 0", "3 1 0 1", "3 2 1 0", "W 1 2 1", "W 2 0 1", "W 3 0 0", ""]))
    write("brieskorn_like.fam", "\n".join([
        "period 2 4 2", "1 3 1 1", "2 4 2 1 0 1", "3 7 3 1", "4 8 4 1 0 1 bad", ""]))
    write("f3_times_dual.alg", format_algebra(
        product_algebra(prime_field(3), quotient_algebra(3, [0, 0, 1]))))
    rp2 = complex_from_matrices("Z", {0: 1, 1: 1, 2: 1}, {0: [[0]], 1: [[2]]}, ZZ)
    write("rp2.cx", format_complex(rp2))
    broken = "\n".join(["homrecomb-scenario 1", "id = corrupted_dga", "[fiber]", "id = M",
                        "complexity = 1", "[cycles]", "V1", "[query]", "chars =", "[files]",
                        "dga = ../broken_leibniz.dga", ""])
    os.makedirs(os.path.join(OUT, "corrupted"), exist_ok=True)
    write(os.path.join("corrupted", "corrupted_dga.scn"), broken)


if __name__ == "__main__":
    main()
