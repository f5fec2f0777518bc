#include "syksd/symmetry.hpp"

#include <algorithm>
#include <stdexcept>

namespace syksd {

std::string label_name(Label l) {
    switch (l) {
        case Label::KC: return "KC";
        case Label::K: return "K";
        case Label::C: return "C";
        default: return "NONE";
    }
}

TwoPointFunction kms_image(const TwoPointFunction& G) {
    const int n = G.grid.n;
    TwoPointFunction R(G.grid);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto& src = G.c(b, a);  // transposed component
            auto& dst = R.c(a, b);
            for (int k = 0; k < n; ++k) dst[k] = src[(n - k) % n];  // t -> -t on the circle
        }
    return R;
}

TwoPointFunction conj_image(const TwoPointFunction& G) {
    const int n = G.grid.n;
    TwoPointFunction R(G.grid);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const auto& src = G.c(1 - a, 1 - b);  // flipped branches
            auto& dst = R.c(a, b);
            for (int k = 0; k < n; ++k) dst[k] = std::conj(src[k]);
        }
    return R;
}

namespace {
TwoPointFunction average_with(const TwoPointFunction& G, TwoPointFunction img) {
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < G.grid.n; ++k)
            img.comp[i][k] = 0.5 * (G.comp[i][k] + img.comp[i][k]);
    return img;
}
}

TwoPointFunction project_kms(const TwoPointFunction& G) { return average_with(G, kms_image(G)); }

TwoPointFunction project_conjugation(const TwoPointFunction& G) { return average_with(G, conj_image(G)); }

double violation(const TwoPointFunction& G, Relation which) {
    const double norm = G.l2();
    if (norm == 0.0) throw std::invalid_argument("violation: zero input");
    const TwoPointFunction P = which == Relation::KMS ? project_kms(G) : project_conjugation(G);
    return l2_diff(G, P) / norm;
}

SymmetryLabel classify(const TwoPointFunction& G, double tol) {
    SymmetryLabel out;
    out.nu_kms = violation(G, Relation::KMS);
    out.nu_conj = violation(G, Relation::CONJ);
    const bool k = out.nu_kms <= tol, c = out.nu_conj <= tol;
    out.label = k && c ? Label::KC : k ? Label::K : c ? Label::C : Label::NONE;
    return out;
}

double orbit_distance(const TwoPointFunction& A, const TwoPointFunction& B) {
    const double scale = std::max(A.l2(), B.l2());
    if (scale == 0.0) return 0.0;
    const TwoPointFunction kB = kms_image(B);
    double d = std::min(l2_diff(A, B), l2_diff(A, kB));
    d = std::min(d, l2_diff(A, conj_image(B)));
    d = std::min(d, l2_diff(A, conj_image(kB)));
    return d / scale;
}

} // namespace syksd
