#include "kinship/txqda.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "binary_io.hpp"
#include "kinship/errors.hpp"

namespace kinship {

namespace {

std::string dims_string(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    s += (i ? "x" : "") + std::to_string(dims[i]);
  }
  return s;
}

Tensor project_except(const Tensor& t, const std::vector<Eigen::MatrixXd>& W, std::size_t skip) {
  Tensor out = t;
  for (std::size_t j = 0; j < W.size(); ++j) {
    if (j != skip) {
      out = mode_product(out, W[j].transpose(), j);
    }
  }
  return out;
}

}  // namespace

void TxqdaConfig::validate(const std::vector<std::size_t>& input_dims) const {
  if (iteration_max < 1) {
    throw UsageError("txqda: iteration_max must be >= 1");
  }
  if (!(reg >= 0.0) || !(eps_stop >= 0.0)) {
    throw UsageError("txqda: reg and eps_stop must be >= 0");
  }
  if (target_dims.size() != input_dims.size()) {
    throw UsageError("txqda: " + std::to_string(target_dims.size()) +
                     " target dims given for order-" + std::to_string(input_dims.size()) +
                     " samples");
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < input_dims.size(); ++k) {
    if (target_dims[k] < 1 || target_dims[k] > input_dims[k]) {
      throw UsageError("txqda: target dims " + dims_string(target_dims) +
                       " must lie within input dims " + dims_string(input_dims));
    }
    total *= target_dims[k];
  }
  if (d < 1 || d > total) {
    throw UsageError("txqda: d = " + std::to_string(d) + " must lie in [1, " +
                     std::to_string(total) + "]");
  }
}

ScatterPair mode_scatter(std::span<const Tensor> parents, std::span<const Tensor> children,
                         const LabeledPairSet& pairs, std::size_t mode) {
  if (pairs.positives.empty() || pairs.negatives.empty()) {
    throw DataError("mode_scatter: both positive and negative pairs are required");
  }
  if (parents.empty() || children.empty()) {
    throw DataError("mode_scatter: no samples");
  }
  const auto rows = static_cast<Eigen::Index>(parents.front().dim(mode));
  std::vector<Eigen::MatrixXd> xp(parents.size());
  std::vector<Eigen::MatrixXd> zc(children.size());
  for (std::size_t i = 0; i < parents.size(); ++i) xp[i] = unfold(parents[i], mode);
  for (std::size_t j = 0; j < children.size(); ++j) zc[j] = unfold(children[j], mode);

  auto accumulate = [&](const std::vector<PairIndex>& list) {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(rows, rows);
    for (const auto& p : list) {
      if (p.parent >= xp.size() || p.child >= zc.size()) {
        throw DataError("mode_scatter: pair index out of range");
      }
      const Eigen::MatrixXd& a = xp[p.parent];
      const Eigen::MatrixXd& b = zc[p.child];
      if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DataError("mode_scatter: parent and child samples differ in shape");
      }
      const Eigen::MatrixXd diff = a - b;
      s.selfadjointView<Eigen::Lower>().rankUpdate(diff);
    }
    s /= static_cast<double>(list.size());
    // Mirror the accumulated lower triangle so the result is exactly symmetric.
    s.triangularView<Eigen::StrictlyUpper>() = s.transpose();
    return s;
  };
  return {accumulate(pairs.positives), accumulate(pairs.negatives)};
}

GenEigen solve_gen_eigen(const Eigen::MatrixXd& extra, const Eigen::MatrixXd& intra,
                         std::size_t dim, double reg) {
  const Eigen::Index n = extra.rows();
  if (extra.cols() != n || intra.rows() != n || intra.cols() != n) {
    throw UsageError("solve_gen_eigen: matrices must be square and of equal size");
  }
  if (dim < 1 || dim > static_cast<std::size_t>(n)) {
    throw UsageError("solve_gen_eigen: dim " + std::to_string(dim) + " outside [1, " +
                     std::to_string(n) + "]");
  }
  if (!extra.allFinite() || !intra.allFinite() || !std::isfinite(reg)) {
    throw NumericError("solve_gen_eigen: non-finite scatter matrix");
  }
  const Eigen::MatrixXd a = 0.5 * (extra + extra.transpose());
  Eigen::MatrixXd b = 0.5 * (intra + intra.transpose());
  b.diagonal().array() += reg;
  if (Eigen::LLT<Eigen::MatrixXd>(b).info() != Eigen::Success) {
    throw NumericError("solve_gen_eigen: S_I + reg*I is not positive definite (reg = " +
                       std::to_string(reg) + ")");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, b, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) {
    throw NumericError("solve_gen_eigen: eigen decomposition failed");
  }
  // Eigen returns ascending eigenvalues.
  GenEigen out;
  const auto k = static_cast<Eigen::Index>(dim);
  out.values.resize(k);
  out.vectors.resize(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index src = n - 1 - c;
    out.values(c) = solver.eigenvalues()(src);
    Eigen::VectorXd v = solver.eigenvectors().col(src);
    v.normalize();
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) {
      v = -v;
    }
    out.vectors.col(c) = v;
  }
  if (!out.values.allFinite() || !out.vectors.allFinite()) {
    throw NumericError("solve_gen_eigen: non-finite eigen solution");
  }
  return out;
}

double relative_residual(const Eigen::MatrixXd& extra, const Eigen::MatrixXd& b,
                         const GenEigen& eig) {
  const double na = extra.norm();
  const double nb = b.norm();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < eig.vectors.cols(); ++c) {
    const Eigen::VectorXd w = eig.vectors.col(c);
    const double lambda = eig.values(c);
    const double r = (extra * w - lambda * (b * w)).norm();
    const double scale = na + std::abs(lambda) * nb;
    worst = std::max(worst, scale > 0.0 ? r / scale : r);
  }
  return worst;
}

std::vector<std::size_t> ProjectionBasis::input_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& w : W) dims.push_back(static_cast<std::size_t>(w.rows()));
  return dims;
}

std::vector<std::size_t> ProjectionBasis::output_dims() const {
  std::vector<std::size_t> dims;
  for (const auto& w : W) dims.push_back(static_cast<std::size_t>(w.cols()));
  return dims;
}

void ProjectionBasis::validate() const {
  if (W.empty() || W.size() != Lambda.size()) {
    throw DataError("projection basis: mode count mismatch");
  }
  std::size_t total = 1;
  for (std::size_t k = 0; k < W.size(); ++k) {
    if (W[k].cols() < 1 || W[k].cols() > W[k].rows()) {
      throw DataError("projection basis: W_" + std::to_string(k) + " has invalid shape");
    }
    if (Lambda[k].size() != W[k].cols() || !Lambda[k].allFinite() || !W[k].allFinite()) {
      throw DataError("projection basis: eigenvalues of mode " + std::to_string(k) +
                      " inconsistent");
    }
    for (Eigen::Index i = 1; i < Lambda[k].size(); ++i) {
      if (Lambda[k](i) > Lambda[k](i - 1)) {
        throw DataError("projection basis: eigenvalues of mode " + std::to_string(k) +
                        " not descending");
      }
    }
    total *= static_cast<std::size_t>(W[k].cols());
  }
  if (feature_rank.size() != total) {
    throw DataError("projection basis: feature rank has " + std::to_string(feature_rank.size()) +
                    " entries, expected " + std::to_string(total));
  }
  std::vector<bool> seen(total, false);
  for (std::size_t r : feature_rank) {
    if (r >= total || seen[r]) {
      throw DataError("projection basis: feature rank is not a permutation");
    }
    seen[r] = true;
  }
  if (d < 1 || d > total) {
    throw DataError("projection basis: d = " + std::to_string(d) + " outside [1, " +
                    std::to_string(total) + "]");
  }
}

ProjectionBasis train_txqda(const TrainTensors& data, const LabeledPairSet& pairs,
                            const TxqdaConfig& cfg) {
  if (data.parents.empty() || data.children.empty()) {
    throw DataError("txqda: empty training views");
  }
  if (pairs.positives.empty() || pairs.negatives.empty()) {
    throw DataError("txqda: training needs positive and negative pairs");
  }
  const std::vector<std::size_t> dims = data.parents.front().dims();
  for (const auto* view : {&data.parents, &data.children}) {
    for (const auto& t : *view) {
      if (t.dims() != dims) {
        throw DataError("txqda: sample shape " + dims_string(t.dims()) + " differs from " +
                        dims_string(dims));
      }
    }
  }
  cfg.validate(dims);
  const std::size_t order = dims.size();

  ProjectionBasis basis;
  basis.d = cfg.d;
  basis.Lambda.assign(order, Eigen::VectorXd());
  for (std::size_t k = 0; k < order; ++k) {
    basis.W.push_back(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dims[k]),
                                                static_cast<Eigen::Index>(cfg.target_dims[k])));
  }

  for (int sweep = 1; sweep <= cfg.iteration_max; ++sweep) {
    const std::vector<Eigen::MatrixXd> previous = basis.W;
    for (std::size_t k = 0; k < order; ++k) {
      std::vector<Tensor> xp;
      std::vector<Tensor> zp;
      xp.reserve(data.parents.size());
      zp.reserve(data.children.size());
      for (const auto& t : data.parents) xp.push_back(project_except(t, basis.W, k));
      for (const auto& t : data.children) zp.push_back(project_except(t, basis.W, k));

      const ScatterPair s = mode_scatter(xp, zp, pairs, k);
      if (s.extra.norm() == 0.0) {
        throw NumericError("txqda: extrapersonal scatter vanishes on mode " + std::to_string(k));
      }
      const double dim_k = static_cast<double>(dims[k]);
      double ridge = cfg.reg * s.intra.trace() / dim_k;
      if (ridge == 0.0 && cfg.reg > 0.0) {
        // S_I = 0 (identical positive pairs): borrow the scale of S_E.
        ridge = cfg.reg * s.extra.trace() / dim_k;
      }
      const GenEigen eig = solve_gen_eigen(s.extra, s.intra, cfg.target_dims[k], ridge);
      Eigen::MatrixXd b = s.intra;
      b.diagonal().array() += ridge;
      basis.max_residual = std::max(basis.max_residual, relative_residual(s.extra, b, eig));
      basis.W[k] = eig.vectors;
      basis.Lambda[k] = eig.values;
    }
    basis.sweeps = sweep;

    bool converged = true;
    for (std::size_t k = 0; k < order; ++k) {
      const double tol = cfg.eps_stop * static_cast<double>(dims[k] * cfg.target_dims[k]);
      if ((basis.W[k] - previous[k]).norm() >= tol) {
        converged = false;
      }
    }
    if (converged) {
      break;
    }
  }

  // Rank projected coordinates by the product of their modes' eigenvalues.
  const std::vector<std::size_t> out_dims = cfg.target_dims;
  const Tensor shape(out_dims);
  std::vector<double> score(shape.size());
  for (std::size_t off = 0; off < score.size(); ++off) {
    const auto idx = shape.index_of(off);
    double p = 1.0;
    for (std::size_t k = 0; k < order; ++k) {
      p *= std::max(basis.Lambda[k](static_cast<Eigen::Index>(idx[k])), 0.0);
    }
    score[off] = p;
  }
  basis.feature_rank.resize(score.size());
  std::iota(basis.feature_rank.begin(), basis.feature_rank.end(), std::size_t{0});
  std::stable_sort(basis.feature_rank.begin(), basis.feature_rank.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  return basis;
}

Eigen::VectorXd project(const Tensor& t, const ProjectionBasis& basis, std::size_t d) {
  const auto in_dims = basis.input_dims();
  if (t.dims() != in_dims) {
    throw DataError("project: tensor shape " + dims_string(t.dims()) +
                    " does not match basis input " + dims_string(in_dims));
  }
  if (d == 0) {
    d = basis.d;
  }
  if (d > basis.feature_rank.size()) {
    throw UsageError("project: d = " + std::to_string(d) + " exceeds the " +
                     std::to_string(basis.feature_rank.size()) + " projected coordinates");
  }
  Tensor y = t;
  for (std::size_t k = 0; k < basis.W.size(); ++k) {
    y = mode_product(y, basis.W[k].transpose(), k);
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    out(static_cast<Eigen::Index>(r)) = y[basis.feature_rank[r]];
  }
  return out;
}

namespace {
constexpr std::string_view kBasisMagic = "TXQDAB01";
constexpr std::uint32_t kBasisVersion = 1;
}  // namespace

void save_basis(const ProjectionBasis& basis, const std::filesystem::path& path) {
  basis.validate();
  detail::BinaryWriter w(path);
  w.magic(kBasisMagic);
  w.put(detail::kEndianTag);
  w.put(kBasisVersion);
  w.put(static_cast<std::uint64_t>(basis.W.size()));
  for (std::size_t k = 0; k < basis.W.size(); ++k) {
    const auto& m = basis.W[k];
    w.put(static_cast<std::uint64_t>(m.rows()));
    w.put(static_cast<std::uint64_t>(m.cols()));
    w.put_all(std::vector<double>(m.data(), m.data() + m.size()));
    const auto& l = basis.Lambda[k];
    w.put_all(std::vector<double>(l.data(), l.data() + l.size()));
  }
  w.put(static_cast<std::uint64_t>(basis.feature_rank.size()));
  std::vector<std::uint64_t> rank(basis.feature_rank.begin(), basis.feature_rank.end());
  w.put_all(rank);
  w.put(static_cast<std::uint64_t>(basis.d));
  w.commit();
}

ProjectionBasis load_basis(const std::filesystem::path& path) {
  detail::BinaryReader r(path, kBasisMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kBasisVersion) {
    throw DataError(path.string() + ": basis version " + std::to_string(version) +
                    " unsupported, expected " + std::to_string(kBasisVersion));
  }
  ProjectionBasis basis;
  const auto order = r.get<std::uint64_t>();
  if (order == 0 || order > 16) {
    throw DataError(path.string() + ": implausible tensor order " + std::to_string(order));
  }
  for (std::uint64_t k = 0; k < order; ++k) {
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    const auto w = r.get_all<double>(rows * cols);
    basis.W.emplace_back(Eigen::Map<const Eigen::MatrixXd>(
        w.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
    const auto l = r.get_all<double>(cols);
    basis.Lambda.emplace_back(
        Eigen::Map<const Eigen::VectorXd>(l.data(), static_cast<Eigen::Index>(cols)));
  }
  const auto n = r.get<std::uint64_t>();
  const auto rank = r.get_all<std::uint64_t>(n);
  basis.feature_rank.assign(rank.begin(), rank.end());
  basis.d = static_cast<std::size_t>(r.get<std::uint64_t>());
  if (!r.at_end()) {
    throw DataError(path.string() + ": trailing bytes");
  }
  basis.validate();
  return basis;
}

}  // namespace kinship
