// Copyright 2026 The Aroma Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aroma/linalg.hpp"
#include "test_support.hpp"

#include <vector>

using namespace aroma;
using namespace aroma::testing;

namespace {

SparseVector<double> dense_vec(std::vector<double> v) {
  Eigen::Map<VectorX<double>> m(v.data(), static_cast<Index>(v.size()));
  return SparseVector<double>::from_dense(m);
}

}  // namespace

TEST_CASE("sparse vector construction validates entries") {
  CHECK_THROWS_AS(SparseVector<double>::from_entries(3, {{3, 1.0}}), DataError);
  CHECK_THROWS_AS(SparseVector<double>::from_entries(3, {{-1, 1.0}}), DataError);
  CHECK_THROWS_AS(SparseVector<double>::from_entries(3, {{1, 1.0}, {1, 2.0}}),
                  DataError);
  CHECK_THROWS_AS(
      SparseVector<double>::from_entries(3, {{1, std::nan("")}}), DataError);

  // zeros are dropped, unsorted input is sorted
  const auto v = SparseVector<double>::from_entries(5, {{4, 2.0}, {1, 0.0}, {0, -1.0}});
  CHECK(v.nnz() == 2);
  CHECK(v.indices()[0] == 0);
  CHECK(v.indices()[1] == 4);
  CHECK(v.values()[0] == -1.0);
}

TEST_CASE("sparse difference cancels exactly") {
  const auto a = SparseVector<double>::from_entries(4, {{0, 1.0}, {2, 2.0}});
  const auto b = SparseVector<double>::from_entries(4, {{0, 1.0}, {3, -1.0}});
  const auto d = sparse_difference(a, b);
  CHECK(d.nnz() == 2);  // index 0 cancels
  CHECK(d.to_dense()(2) == 2.0);
  CHECK(d.to_dense()(3) == 1.0);
}

TEST_CASE("bilinear score: identity reduces to dot product") {
  const auto q = dense_vec({1, 2});
  const auto p = dense_vec({3, 4});
  const MatrixX<double> eye = MatrixX<double>::Identity(2, 2);
  CHECK(bilinear_score(q, eye, p) == doctest::Approx(11.0).epsilon(1e-15));
}

TEST_CASE("bilinear score: zero query annihilates the form") {
  const SparseVector<double> q(3);
  const auto p = dense_vec({1, 2, 3, 4});
  std::mt19937_64 g(7);
  const MatrixX<double> w = random_matrix(g, 3, 4);
  CHECK(bilinear_score(q, w, p) == 0.0);
}

TEST_CASE("bilinear score matches the dense triple-product oracle") {
  std::mt19937_64 g(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto q = random_sparse(g, 5);
    const auto p = random_sparse(g, 5);
    const MatrixX<double> w = random_matrix(g, 5, 5);
    const double oracle = q.to_dense().transpose() * w * p.to_dense();
    CHECK(bilinear_score(q, w, p) == doctest::Approx(oracle).epsilon(1e-12));
  }
}

TEST_CASE("bilinear score visits at most nnz(q)*nnz(p) pairs") {
  std::mt19937_64 g(13);
  for (int rep = 0; rep < 20; ++rep) {
    const auto q = random_sparse(g, 6);
    const auto p = random_sparse(g, 7);
    const MatrixX<double> w = random_matrix(g, 6, 7);
    std::size_t visits = 1234;
    bilinear_score(q, w, p, &visits);
    CHECK(visits <= static_cast<std::size_t>(q.nnz() * p.nnz()));
  }
}

TEST_CASE("bilinear score rejects dimension mismatch") {
  const auto q = dense_vec({1, 2});
  const auto p = dense_vec({3, 4});
  const MatrixX<double> w = MatrixX<double>::Zero(3, 2);
  CHECK_THROWS_AS(bilinear_score(q, w, p), DimensionError);
}

TEST_CASE("vec stacks columns") {
  MatrixX<double> w(2, 2);
  w << 1, 2, 3, 4;
  const VectorX<double> v = vec(w);
  CHECK(v(0) == 1);
  CHECK(v(1) == 3);
  CHECK(v(2) == 2);
  CHECK(v(3) == 4);

  const VectorX<double> z = vec(MatrixX<double>::Zero(3, 4));
  CHECK(z.size() == 12);
  CHECK(z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vec(W) . vec(outer(q,p)) equals the bilinear score") {
  std::mt19937_64 g(17);
  for (int rep = 0; rep < 50; ++rep) {
    const auto q = random_sparse(g, 3);
    const auto p = random_sparse(g, 4);
    const MatrixX<double> w = random_matrix(g, 3, 4);
    const double lhs = vec(w).dot(vec(outer(q, p)));
    const double rhs = bilinear_score(q, w, p);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("outer product matches the elementwise oracle") {
  const auto q = SparseVector<double>::from_entries(2, {{0, 1.0}});
  const auto p = SparseVector<double>::from_entries(2, {{1, 2.0}});
  const MatrixX<double> r = outer(q, p);
  CHECK(r(0, 0) == 0.0);
  CHECK(r(0, 1) == 2.0);
  CHECK(r(1, 0) == 0.0);
  CHECK(r(1, 1) == 0.0);

  const SparseVector<double> zq(3);
  CHECK(outer(zq, p).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 g(19);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = random_sparse(g, 4);
    const auto b = random_sparse(g, 3);
    const MatrixX<double> got = outer(a, b);
    const VectorX<double> ad = a.to_dense(), bd = b.to_dense();
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 3; ++j)
        CHECK(got(i, j) == doctest::Approx(ad(i) * bd(j)).epsilon(1e-15));
  }
}

TEST_CASE("kron quadratic form: identity covariances give squared norms") {
  const auto q = dense_vec({1, 2});
  const auto p = SparseVector<double>::from_entries(2, {{0, 3.0}});
  const MatrixX<double> eye = MatrixX<double>::Identity(2, 2);
  CHECK(kron_quadratic_form(q, eye, p, eye) == doctest::Approx(45.0));

  const SparseVector<double> zp(2);
  CHECK(kron_quadratic_form(q, eye, zp, eye) == 0.0);
}

TEST_CASE("kron quadratic form equals the explicit Kronecker oracle") {
  std::mt19937_64 g(23);
  for (Index m = 1; m <= 4; ++m) {
    for (Index n = 1; n <= 4; ++n) {
      for (int rep = 0; rep < 10; ++rep) {
        const auto q = random_sparse(g, m);
        const auto p = random_sparse(g, n);
        const MatrixX<double> lam = random_spd(g, m);
        const MatrixX<double> omg = random_spd(g, n);
        const VectorX<double> x = vec(outer(q, p));
        const MatrixX<double> big = kron_oracle(omg, lam);  // cov of vec(q p')
        const double oracle = x.transpose() * big * x;
        const double got = kron_quadratic_form(q, lam, p, omg);
        CHECK(got == doctest::Approx(oracle).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("kron quadratic form rejects dimension mismatch") {
  const auto q = dense_vec({1, 2});
  const auto p = dense_vec({1, 2, 3});
  const MatrixX<double> eye2 = MatrixX<double>::Identity(2, 2);
  CHECK_THROWS_AS(kron_quadratic_form(q, eye2, p, eye2), DimensionError);
}

TEST_CASE("dense_times_sparse matches dense product") {
  std::mt19937_64 g(29);
  const MatrixX<double> m = random_matrix(g, 4, 6);
  const auto s = random_sparse(g, 6);
  const VectorX<double> got = dense_times_sparse(m, s);
  const VectorX<double> want = m * s.to_dense();
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-14);
}
