#pragma once

#include <optional>
#include <string>

#include "gsys/analytic.hpp"

namespace gsys {

/// Stationary-family label. S1Star is S1 minus (S2 union S3); pairs landing
/// in an overlap resolve with priority S3 > S2 > S1 so the decomposition
/// stays disjoint.
struct FamilyLabel {
    enum class Tag { S1, S1Star, S2, S3, NotStationary };
    Tag tag = Tag::NotStationary;

    double alpha = 0.0;                // exp-term weight for S2/S3
    std::vector<double> linear_coeffs;  // S2 additive drift f(t) = <c,t>
    double offset_c = 0.0;             // the constant c of the family form
    double lambda = 0.0;               // S3 measure rate
    std::string kernel_id;             // S1/S1Star kernel registry id
};

std::string to_string(FamilyLabel::Tag tag);

struct EvidenceItem {
    std::string check;
    double residual = 0.0;
};

struct ClassificationReport {
    FamilyLabel label;
    std::vector<EvidenceItem> evidence;
    std::optional<PairSpec> canonical;  // present for S2/S3
};

/// Decision procedure over the DSL pairs; NotStationary is a verdict, not an
/// error, and carries the first violated condition in the evidence list.
ClassificationReport classify_pair(const PairSpec& pair, const std::vector<TimePoint>& grid, double tol);
ClassificationReport classify_pair(const PairSpec& pair);  // default lattice, tol 1e-9

/// Unique canonical representative (xi(0) = 0) of an S2/S3 pair: S2 drops the
/// process offset, S3 additionally rolls the constant c into the measure via
/// m * delta_c. Throws for other labels.
PairSpec canonicalize(const PairSpec& pair);

struct EqualInLawCertificate {
    bool equal = false;
    std::optional<GaussianMeasure1D> n0;  // the shift law N0 for S1Star pairs
    int direction = 0;                    // +1: m_a = m_b * n0 ; -1: mirrored
    std::string reason;
};

/// Analytic equality-in-law decision: labels must match; S2/S3 compare
/// canonical pairs; S1Star pairs are tested through the N0-shift criterion.
/// Requires both pairs stationary.
EqualInLawCertificate equal_in_law_analytic(const PairSpec& a, const PairSpec& b,
                                            const std::vector<TimePoint>& grid, double tol);
EqualInLawCertificate equal_in_law_analytic(const PairSpec& a, const PairSpec& b);

}  // namespace gsys
