#include "psiapprox/orthonormal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace psiapprox {
namespace {

constexpr double kRankPivot = 1e-12;

// v -= sum_i <v, q_i> q_i twice (columns of Qs already scaled by sqrt(w)).
Eigen::VectorXcd project_out(Eigen::VectorXcd& v, const Eigen::MatrixXcd& Qs, Eigen::Index count) {
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(count);
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index i = 0; i < count; ++i) {
      const Complex c = Qs.col(i).dot(v);  // conj(q)^T v
      v -= c * Qs.col(i);
      h(i) += c;
    }
  }
  return h;
}

}  // namespace

Orthonormalization orthonormalize(const Eigen::MatrixXcd& A, const Eigen::VectorXd& weights) {
  const Eigen::Index M = A.rows();
  const Eigen::Index d = A.cols();
  if (weights.size() != M) throw std::invalid_argument("orthonormalize: weight count != rows");
  if ((weights.array() <= 0.0).any()) throw std::invalid_argument("orthonormalize: weights must be positive");
  const Eigen::VectorXd sw = weights.cwiseSqrt();
  Eigen::MatrixXcd As = sw.asDiagonal() * A;
  double max_norm = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) max_norm = std::max(max_norm, As.col(k).norm());

  Eigen::MatrixXcd Qs(M, std::min(M, d));
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(std::min(M, d), d);
  Orthonormalization out;
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXcd v = As.col(k);
    const Eigen::VectorXcd h = project_out(v, Qs, r);
    R.col(k).head(r) = h;
    const double nv = v.norm();
    if (r < Qs.cols() && nv > kRankPivot * max_norm && nv > 0.0) {
      Qs.col(r) = v / nv;
      R(r, k) = nv;
      out.kept.push_back(static_cast<int>(k));
      ++r;
    }
  }
  out.effective_dimension = r;
  out.Q = sw.cwiseInverse().asDiagonal() * Qs.leftCols(r);
  out.R = R.topRows(r);
  return out;
}

std::shared_ptr<const OrthonormalBasis> OrthonormalBasis::build(const ManifoldModel& model,
                                                                std::vector<BasisElement> basis,
                                                                const CompactSample& sample) {
  auto ob = std::shared_ptr<OrthonormalBasis>(new OrthonormalBasis(model));
  const Eigen::Index M = static_cast<Eigen::Index>(sample.size());
  const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
  if (d == 0) throw std::invalid_argument("orthonormal basis: empty basis");
  ob->weights_ = sample.weights;
  const Eigen::VectorXd sw = sample.weights.cwiseSqrt();

  if (model.kind() == ModelKind::Torus) {
    Eigen::MatrixXcd A(M, d);
    for (Eigen::Index i = 0; i < M; ++i) {
      for (Eigen::Index k = 0; k < d; ++k) A(i, k) = basis_value(model, basis[k], sample.points[i]);
    }
    Orthonormalization o = orthonormalize(A, sample.weights);
    ob->Q_ = o.Q;
    // T = columns of R^{-1} over kept basis elements.
    const Eigen::Index r = o.effective_dimension;
    Eigen::MatrixXcd Rk(r, r);
    for (Eigen::Index j = 0; j < r; ++j) Rk.col(j) = o.R.col(o.kept[j]);
    const Eigen::MatrixXcd Rinv =
        Rk.triangularView<Eigen::Upper>().solve(Eigen::MatrixXcd::Identity(r, r));
    ob->T_ = Eigen::MatrixXcd::Zero(d, r);
    for (Eigen::Index j = 0; j < r; ++j) ob->T_.row(o.kept[j]) = Rinv.row(j);
    ob->basis_ = std::move(basis);
    return ob;
  }

  ob->recurrence_ = true;
  if (std::any_of(basis[0].exponents.begin(), basis[0].exponents.end(), [](int e) { return e != 0; })) {
    throw std::invalid_argument("orthonormal basis: first element must be the constant");
  }
  std::map<std::vector<int>, int> index;
  for (Eigen::Index k = 0; k < d; ++k) index[basis[k].exponents] = static_cast<int>(k);

  const int gens = model.generator_count();
  Eigen::MatrixXcd G(M, gens);
  for (Eigen::Index i = 0; i < M; ++i) {
    for (int j = 0; j < gens; ++j) G(i, j) = model.generator(j, sample.points[i]);
  }

  // S holds, scaled by sqrt(w), q_k for kept steps and the raw recurrence vector for dropped ones.
  Eigen::MatrixXcd S(M, d);
  Eigen::MatrixXcd Qs(M, std::min(M, d));
  Eigen::MatrixXcd Traw = Eigen::MatrixXcd::Zero(d, d);  // basis coefficients of each S column
  std::vector<int> kept;
  ob->steps_.resize(d);

  auto shift = [&](const Eigen::VectorXcd& coeffs, int gen) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (coeffs(i) == Complex(0.0)) continue;
      const auto it = index.find(model.multiply_by_generator(basis[i].exponents, gen));
      if (it == index.end()) throw std::logic_error("orthonormal basis: basis set not closed under recurrence");
      out(it->second) += coeffs(i);
    }
    return out;
  };

  // Constant: q_0 = 1 / ||1||_w.
  {
    Step& st = ob->steps_[0];
    const double n0 = sw.norm();
    S.col(0) = sw / n0;
    Qs.col(0) = S.col(0);
    st.kept = true;
    st.q_index = 0;
    st.pivot = n0;
    Traw(0, 0) = 1.0 / n0;
    kept.push_back(0);
  }
  for (Eigen::Index k = 1; k < d; ++k) {
    Step& st = ob->steps_[k];
    // Parent: the latest element b with exponents(k) = generator * b.
    for (int j = 0; j < gens; ++j) {
      for (Eigen::Index p = k - 1; p >= 0; --p) {
        if (model.multiply_by_generator(basis[p].exponents, j) == basis[k].exponents) {
          if (p > st.parent) {
            st.parent = static_cast<int>(p);
            st.generator = j;
          }
          break;
        }
      }
    }
    if (st.parent < 0) throw std::logic_error("orthonormal basis: element without a recurrence parent");
    Eigen::VectorXcd v = G.col(st.generator).cwiseProduct(S.col(st.parent));
    Eigen::VectorXcd tv = shift(Traw.col(st.parent), st.generator);
    const double before = v.norm();
    const Eigen::Index r = static_cast<Eigen::Index>(kept.size());
    Eigen::VectorXcd w = v;
    const Eigen::VectorXcd h = project_out(w, Qs, r);
    const double after = w.norm();
    if (r < Qs.cols() && after > kRankPivot * before && after > 0.0) {
      st.kept = true;
      st.q_index = static_cast<int>(r);
      st.h = h;
      st.pivot = after;
      S.col(k) = w / after;
      Qs.col(r) = S.col(k);
      for (Eigen::Index i = 0; i < r; ++i) tv -= h(i) * Traw.col(kept[i]);
      Traw.col(k) = tv / after;
      kept.push_back(static_cast<int>(k));
    } else {
      S.col(k) = v;
      Traw.col(k) = tv;
    }
  }
  const Eigen::Index r = static_cast<Eigen::Index>(kept.size());
  ob->Q_ = sw.cwiseInverse().asDiagonal() * Qs.leftCols(r);
  ob->T_.resize(d, r);
  for (Eigen::Index j = 0; j < r; ++j) ob->T_.col(j) = Traw.col(kept[j]);
  ob->basis_ = std::move(basis);
  return ob;
}

Eigen::VectorXcd OrthonormalBasis::evaluate(const Point& z) const {
  if (!recurrence_) {
    Eigen::VectorXcd b(nominal_dimension());
    for (Eigen::Index k = 0; k < nominal_dimension(); ++k) b(k) = basis_value(model_, basis_[k], z);
    return T_.transpose() * b;
  }
  const Eigen::Index d = nominal_dimension();
  const int gens = model_.generator_count();
  std::vector<Complex> g(gens);
  for (int j = 0; j < gens; ++j) g[j] = model_.generator(j, z);
  Eigen::VectorXcd s(d);
  Eigen::VectorXcd q(dimension());
  s(0) = 1.0 / steps_[0].pivot;
  q(0) = s(0);
  for (Eigen::Index k = 1; k < d; ++k) {
    const Step& st = steps_[k];
    Complex v = g[st.generator] * s(st.parent);
    if (st.kept) {
      for (Eigen::Index i = 0; i < st.h.size(); ++i) v -= st.h(i) * q(i);
      v /= st.pivot;
      q(st.q_index) = v;
    }
    s(k) = v;
  }
  return q;
}

Eigen::VectorXcd OrthonormalBasis::basis_coefficients(const Eigen::VectorXcd& y) const { return T_ * y; }

}  // namespace psiapprox
