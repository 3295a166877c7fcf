#pragma once

// Small named algebras used as fixtures, in tests and by the benchmark generator.

#include <string>

#include "fewsub/algebra.hpp"

namespace fewsub::algebras {

/// Z_p with the single Maltsev operation m(x,y,z) = x - y + z (for p = 2, x xor y xor z).
inline FiniteAlgebra affine_zp(int p) {
    auto m = OperationTable::from_function("m", 3, p, [p](std::span<const Element> a) {
        return ((a[0] - a[1] + a[2]) % p + p) % p;
    });
    return FiniteAlgebra("Z" + std::to_string(p) + "-affine", p, {m});
}

/// {0,1} with the ternary majority operation.
inline FiniteAlgebra majority2() {
    auto maj = OperationTable::from_function("maj", 3, 2, [](std::span<const Element> a) {
        return (a[0] + a[1] + a[2]) >= 2 ? 1 : 0;
    });
    return FiniteAlgebra("majority", 2, {maj});
}

/// ({0,1}, meet).
inline FiniteAlgebra semilattice2() {
    auto meet = OperationTable::from_function("meet", 2, 2, [](std::span<const Element> a) {
        return a[0] & a[1];
    });
    return FiniteAlgebra("semilattice", 2, {meet});
}

/// The one-element algebra with a single ternary operation.
inline FiniteAlgebra trivial() {
    auto t = OperationTable::from_function("t", 3, 1, [](std::span<const Element>) { return 0; });
    return FiniteAlgebra("trivial", 1, {t});
}

}  // namespace fewsub::algebras
