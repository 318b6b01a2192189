#include <doctest.h>

#include "pml/sequence.hpp"
#include "support.hpp"

using namespace pml;
using pmltest::rand_int;
using pmltest::rand_line_measure;

TEST_SUITE("sequence") {

TEST_CASE("monomial_position follows the degree-lex layout") {
  CHECK(monomial_position(0, 0) == 0);
  CHECK(monomial_position(1, 0) == 1);
  CHECK(monomial_position(0, 1) == 2);
  CHECK(monomial_position(2, 0) == 3);
  CHECK(monomial_position(1, 1) == 4);
  CHECK(monomial_position(0, 2) == 5);
  CHECK(monomial_position(3, 0) == 6);
}

TEST_CASE("line order sorts by y-degree then x-degree") {
  MonomialIndex idx(2);
  std::vector<Eigen::Index> expect{0, 1, 3, 2, 4, 5};
  CHECK(idx.line_perm() == expect);
  CHECK(MonomialIndex::line_prefix_size(3, 2) == 7);
  CHECK(MonomialIndex::line_prefix_size(3, 3) == 9);
  CHECK(MonomialIndex::line_prefix_size(4, 4) == 14);
}

TEST_CASE("moment matrix entries add exponents") {
  int k = 2;
  BivariateMomentSequence<Rational> seq(k);
  for (int d = 0; d <= 2 * k; ++d)
    for (int j = 0; j <= d; ++j)
      seq.set(d - j, j, Rational(monomial_position(d - j, j) + 1));
  MatQ M = build_moment_matrix(seq);
  MonomialIndex idx(k);
  CHECK(M.rows() == idx.size());
  CHECK(M(idx.position(1, 0), idx.position(0, 1)) == seq.beta(1, 1));
  CHECK(M(idx.position(2, 0), idx.position(0, 2)) == seq.beta(2, 2));
  CHECK(M(idx.position(0, 0), idx.position(2, 0)) == seq.beta(2, 0));
  CHECK(Mat<Rational>(M - Mat<Rational>(M.transpose())).isZero(0));
}

TEST_CASE("permute_line_order relabels consistently") {
  int k = 2;
  AtomicMeasure2D mu = rand_line_measure({Rational(0), Rational(1)}, 2);
  auto seq = moments_of_measure<Rational>(mu, k);
  MonomialIndex idx(k);
  MatQ M = build_moment_matrix(seq);
  MatQ P = permute_line_order(M, idx);
  const auto& perm = idx.line_perm();
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c)
      CHECK(P(r, c) == M(perm[static_cast<size_t>(r)], perm[static_cast<size_t>(c)]));
}

TEST_CASE("restrict extracts labelled principal blocks") {
  int k = 2;
  AtomicMeasure2D mu = rand_line_measure({Rational(0), Rational(2)}, 2);
  auto seq = moments_of_measure<Rational>(mu, k);
  MonomialIndex idx(k);
  MatQ M = build_moment_matrix(seq);
  std::vector<Monomial> subset{{0, 0}, {1, 0}, {0, 1}};
  MatQ R = restrict(M, idx, subset);
  CHECK(R.rows() == 3);
  CHECK(R(0, 0) == seq.beta(0, 0));
  CHECK(R(1, 2) == seq.beta(1, 1));
  CHECK(R(2, 2) == seq.beta(0, 2));
}

TEST_CASE("riesz functional evaluates polynomials against moments") {
  int k = 2;
  AtomicMeasure2D mu = rand_line_measure({Rational(-1), Rational(1)}, 2);
  auto seq = moments_of_measure<Rational>(mu, k);
  Poly2<Rational> p;
  p[{0, 0}] = Rational(3);
  p[{1, 1}] = Rational(-2);
  p[{2, 0}] = Rational(1, 2);
  Rational expect = Rational(3) * seq.beta(0, 0) - Rational(2) * seq.beta(1, 1) +
                    Rational(1, 2) * seq.beta(2, 0);
  CHECK(riesz_apply(seq, p) == expect);
}

TEST_CASE("moments of an atomic measure produce psd moment matrices") {
  for (int trial = 0; trial < 10; ++trial) {
    int k = rand_int(2, 3);
    std::vector<Rational> alphas{Rational(rand_int(-2, 0)), Rational(rand_int(1, 3))};
    AtomicMeasure2D mu = rand_line_measure(alphas, rand_int(1, k));
    auto seq = moments_of_measure<Rational>(mu, k);
    MatQ M = build_moment_matrix(seq);
    auto cert = psd_check(M);
    CHECK(cert.is_psd());
    CHECK(cert.rank <= static_cast<Eigen::Index>(mu.atoms.size()));
  }
}

TEST_CASE("moment matrices of measures are recursively generated") {
  for (int trial = 0; trial < 8; ++trial) {
    int k = rand_int(2, 3);
    std::vector<Rational> alphas{Rational(0), Rational(1)};
    AtomicMeasure2D mu = rand_line_measure(alphas, rand_int(1, k - 1));
    auto seq = moments_of_measure<Rational>(mu, k);
    CHECK(check_recursively_generated(seq).ok);
    auto seqd = seq.template cast<double>();
    CHECK(check_recursively_generated(seqd, Tol{1e-9, 1e-9}).ok);
  }
}

TEST_CASE("a broken product relation is flagged") {
  // Column relation X = 1 holds, yet X^2 differs from X, so multiplying the
  // relation by X exposes the inconsistency.
  BivariateMomentSequence<Rational> seq(2);
  seq.set(0, 0, Rational(1));
  seq.set(1, 0, Rational(1));
  seq.set(2, 0, Rational(1));
  seq.set(3, 0, Rational(1));
  seq.set(4, 0, Rational(5));
  CHECK_FALSE(check_recursively_generated(seq).ok);
  CHECK_FALSE(check_recursively_generated(seq.cast<double>(), Tol{1e-9, 1e-9}).ok);
}

TEST_CASE("1-d moments match direct powers") {
  AtomicMeasure1D mu;
  mu.atoms.push_back({XValue(Rational(2)), XValue(Rational(1, 2))});
  mu.atoms.push_back({XValue(Rational(-1)), XValue(Rational(3))});
  auto seq = moments_of_measure_1d<Rational>(mu, 4);
  CHECK(seq[0] == Rational(7, 2));
  CHECK(seq[1] == Rational(-2));
  CHECK(seq[2] == Rational(5));
  CHECK(seq[3] == Rational(1));
}

}
