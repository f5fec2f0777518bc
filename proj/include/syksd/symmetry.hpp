// symmetry.hpp - KMS / conjugation projectors, violation measures, labels, orbit tools
#pragma once

#include "syksd/twopoint.hpp"

#include <string>

namespace syksd {

enum class Label { KC, K, C, NONE };

std::string label_name(Label l);

struct SymmetryLabel {
    Label label;
    double nu_kms;   // relative L2 violation of G_ab(t) = G_ba(-t)
    double nu_conj;  // relative L2 violation of G_ab(t) = conj(G_{a~ b~}(t))
};

// Image of G under the KMS transposition  G_ab(t) -> G_ba(-t); an involution.
TwoPointFunction kms_image(const TwoPointFunction& G);

// Image under modular conjugation  G_ab(t) -> conj(G_{a~ b~}(t)), a~ = flipped branch.
TwoPointFunction conj_image(const TwoPointFunction& G);

// Averaging projectors onto the symmetric subspaces; idempotent, commuting,
// non-expansive in L2.
TwoPointFunction project_kms(const TwoPointFunction& G);
TwoPointFunction project_conjugation(const TwoPointFunction& G);

enum class Relation { KMS, CONJ };

// || G - P(G) ||_2 / || G ||_2 over all four components; throws on zero input.
double violation(const TwoPointFunction& G, Relation which);

// Label by which relations hold within tol (default 1e-6).
SymmetryLabel classify(const TwoPointFunction& G, double tol = 1e-6);

// Distance between solutions up to the symmetry orbit {G, K(G), C(G), KC(G)}:
// min over images of ||A - img(B)||_2 / max(||A||_2, ||B||_2).  Both symmetries
// map solutions to solutions, so records are identified orbit-wise.
double orbit_distance(const TwoPointFunction& A, const TwoPointFunction& B);

} // namespace syksd
