"""Two invariants that tell exotic structures apart.

Frobenius fixed points of x -> x^p in the even part of SH over F_p are
multiplicative under boundary connect sum, and an infinite product of
SH groups has countable dimension exactly when p lies in the prime set.
"""

from homrecomb.mapping_torus import (
    PrimeSet,
    countability_classifier,
    frobenius_count,
    prime_field,
    product_algebra,
    quotient_algebra,
)

f4 = quotient_algebra(2, [1, 1, 1])
dual = quotient_algebra(3, [0, 0, 1])
print("N(F_5)        =", frobenius_count(prime_field(5)))
print("N(F_4 over F_2) =", frobenius_count(f4))
for k in range(1, 5):
    print(f"N(dual^{k})     =", frobenius_count(product_algebra(*[dual] * k)))

P = PrimeSet.finite([2, 3])
print()
for char in (0, 2, 3, 5):
    res = countability_classifier(P, char)
    print(f"P = {{2, 3}}, char {char}: countable = {res.countable}")
