#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpdo/eval.hpp"
#include "lpdo/lpdo.hpp"

namespace lpdo {

struct MultipleRootError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Projective root of the principal symbol. A finite root omega stands for
/// the factor direction (alpha, beta) = (1, -omega); the root at infinity
/// (vanishing leading coefficient) for (0, 1).
struct RootDirection {
  bool infinite = false;
  Expr omega;
  int multiplicity = 1;

  static RootDirection finite(const Expr& w, int mult = 1) { return {false, w, mult}; }
  static RootDirection at_infinity(int mult = 1) { return {true, Expr(), mult}; }

  Expr alpha() const { return infinite ? Expr() : make_int(1); }
  Expr beta() const { return infinite ? make_int(1) : neg(omega); }
};

std::string to_string(const RootDirection& r);

struct RootAnalysis {
  std::vector<RootDirection> roots;
  int unresolved = 0;  // symbol degree not accounted for by the found roots
};

/// All projective roots of the principal symbol, with multiplicities verified
/// through derivative zero-tests of the characteristic polynomial. Exact
/// formulas cover degree <= 2 with arbitrary coefficients and degrees 3-4
/// with rational coefficients (radical formulas plus rational-root
/// deflation); nonconstant symbols of degree 3-4 are attacked by monomial
/// candidates drawn from the coefficients. Whatever remains is counted in
/// `unresolved` rather than guessed.
RootAnalysis roots(const Lpdo& a);

/// First-order operator alpha*Dx + beta*Dy + p.
struct LinearFactor {
  Expr alpha, beta, p;
};

Lpdo to_lpdo(const LinearFactor& f);
std::string to_string(const LinearFactor& f);

enum class FactorStatus { Factored, Obstructed, RiccatiRequired };
const char* to_string(FactorStatus s);

enum class FactorSide { Left, Right };

struct Invariant {
  int grade;
  Expr value;
  ZeroVerdict verdict;
};

/// Outcome of a single factor extraction. For side == Left the claim is
/// A = factor o cofactor, for side == Right it is A = cofactor o factor;
/// either way the claim holds exactly iff status == Factored.
struct FactorizationReport {
  RootDirection root;
  FactorSide side = FactorSide::Left;
  FactorStatus status = FactorStatus::Obstructed;
  LinearFactor factor;
  Lpdo cofactor;
  std::vector<Invariant> invariants;  // grades n-2 down to 0
  std::optional<Expr> riccati;        // residual in the unknown r (multiple roots)
};

/// Name of the fresh unknown introduced at a multiple root.
inline constexpr const char* kRiccatiUnknown = "r";

/// Grade-by-grade coefficient matching against A = (a*Dx + b*Dy + p) o Q.
/// The root must be simple; the n-1 compatibility residuals are returned as
/// the generalized invariants, and status == Factored iff all of them are
/// zero, in which case compose(factor, cofactor) equals A coefficient-wise.
FactorizationReport extract_left_factor(const Lpdo& a, const RootDirection& root);

/// Laplace invariants (a_hat, b_hat) of an operator in the normal form
/// Dx*Dy + a*Dx + b*Dy + c:  a_hat = c - a*b - a_x,  b_hat = c - a*b - b_y.
std::pair<Expr, Expr> laplace_invariants(const Lpdo& a);

/// Same matching at a multiple root: the undetermined scalar becomes the
/// unknown r and the first non-satisfiable equation is reported as a
/// differential residual in r (normalized so the r^2 coefficient is 1 when
/// present). No Riccati equation is ever solved here.
FactorizationReport riccati_obstruction(const Lpdo& a, const RootDirection& root);

/// Substitutes a candidate r into the multiple-root matching and zero-tests
/// every residual; on success returns the Factored report whose factor and
/// cofactor recompose to A.
FactorizationReport verify_riccati(const Lpdo& a, const RootDirection& root,
                                   const Expr& candidate);

/// Right factor via duality: a right factor of A is the transpose of a left
/// factor of A^t. Verified claim: A = cofactor o factor.
FactorizationReport extract_right_factor(const Lpdo& a, const RootDirection& root);

/// Validates a proposed root against the principal symbol and measures its
/// multiplicity; nullopt when the direction is not a root.
std::optional<RootDirection> classify_root(const Lpdo& a, const RootDirection& candidate);

struct FactorOptions {
  bool all = false;
  std::vector<RootDirection> user_roots;   // tried first at every level
  std::vector<Expr> riccati_candidates;    // consumed in encounter order
};

struct FactorChain {
  std::vector<LinearFactor> factors;  // composition, left to right, equals A
};

std::string to_string(const FactorChain& c);

struct FactorizationResult {
  std::vector<FactorChain> chains;
  std::vector<FactorizationReport> obstructions;  // dead branches
  bool unresolved_roots = false;
};

/// Depth-first recursion over the roots at each level; every emitted chain
/// recomposes to A (checked). With all == false stops at the first chain.
FactorizationResult full_factorization(const Lpdo& a, const FactorOptions& options = {});

}  // namespace lpdo
