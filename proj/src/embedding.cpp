#include "jargon/embedding.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <random>

#include "jargon/error.hpp"
#include "jargon/parallel.hpp"

namespace jargon {

namespace {

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

double cosine_from(double uv, double norm_u, double norm_v) noexcept {
  if (norm_u == 0.0 || norm_v == 0.0) return 0.0;
  return std::clamp(uv / (norm_u * norm_v), -1.0, 1.0);
}

// Box-Muller over raw 64-bit draws, so the stream is the same on every
// standard library.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  // Uniform in (0, 1).
  double unit() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  return qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
}

RowSparse to_eigen(const SparseMatrix& m) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(m.nnz());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t i = m.offsets[r]; i < m.offsets[r + 1]; ++i) {
      triplets.emplace_back(static_cast<int>(r), static_cast<int>(m.columns[i]), m.values[i]);
    }
  }
  RowSparse a(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols));
  a.setFromTriplets(triplets.begin(), triplets.end());
  return a;
}

bool ranks_higher(const Neighbor& a, const Neighbor& b, const Vocabulary& vocab) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return vocab.lexical_rank(a.word) < vocab.lexical_rank(b.word);
}

// Scans every other nonzero row; `norms` holds sqrt(dot(row, row)).
NeighborList scan_neighbors(WordId w, const EmbeddingMatrix& emb, const std::vector<double>& norms, std::size_t k) {
  NeighborList out;
  out.query = w;
  if (norms[w] == 0.0) {
    out.zero_vector = true;
    return out;
  }
  const double* u = emb.data.data() + std::size_t{w} * emb.dim;
  std::vector<Neighbor> all;
  all.reserve(norms.size());
  for (WordId v = 0; v < norms.size(); ++v) {
    if (v == w || norms[v] == 0.0) continue;
    const double uv = dot(u, emb.data.data() + std::size_t{v} * emb.dim, emb.dim);
    all.push_back({v, cosine_from(uv, norms[w], norms[v])});
  }
  const auto& vocab = *emb.vocab;
  const auto cmp = [&](const Neighbor& a, const Neighbor& b) { return ranks_higher(a, b, vocab); };
  const std::size_t keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), cmp);
  all.resize(keep);
  out.entries = std::move(all);
  return out;
}

std::vector<double> row_norms(const EmbeddingMatrix& emb) {
  std::vector<double> norms(emb.rows());
  for (std::size_t r = 0; r < norms.size(); ++r) {
    const double* u = emb.data.data() + r * emb.dim;
    norms[r] = std::sqrt(dot(u, u, emb.dim));
  }
  return norms;
}

}  // namespace

SparseCounts build_cooccurrence(const Corpus& corpus, const Vocabulary& vocab, std::size_t window, unsigned threads) {
  if (window == 0) throw InvalidArgument("embedding window must be >= 1");
  return scan_windows(corpus, vocab, window, threads);
}

SparseMatrix ppmi_transform(const SparseCounts& cooc) {
  const std::size_t n = cooc.rows();
  std::vector<double> row_sums(n, 0.0);
  std::vector<double> col_sums(n, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = cooc.offsets[r]; i < cooc.offsets[r + 1]; ++i) {
      const auto c = static_cast<double>(cooc.values[i]);
      row_sums[r] += c;
      if (cooc.columns[i] >= col_sums.size()) col_sums.resize(cooc.columns[i] + 1, 0.0);
      col_sums[cooc.columns[i]] += c;
      total += c;
    }
  }
  if (total == 0.0) throw InvalidArgument("ppmi_transform: co-occurrence matrix has no counts");

  SparseMatrix out;
  out.cols = std::max(n, col_sums.size());
  out.offsets.assign(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = cooc.offsets[r]; i < cooc.offsets[r + 1]; ++i) {
      const double pmi =
          std::log(static_cast<double>(cooc.values[i]) * total / (row_sums[r] * col_sums[cooc.columns[i]]));
      if (pmi > 0.0) {
        out.columns.push_back(cooc.columns[i]);
        out.values.push_back(pmi);
      }
    }
    out.offsets[r + 1] = out.columns.size();
  }
  return out;
}

std::vector<double> factorize(const SparseMatrix& ppmi, std::size_t d, std::uint64_t seed) {
  const std::size_t n = ppmi.rows();
  if (d == 0) throw InvalidArgument("embedding dimension must be >= 1");
  if (d > n) {
    throw InvalidArgument("embedding dimension " + std::to_string(d) + " exceeds vocabulary size " + std::to_string(n));
  }
  const RowSparse a = to_eigen(ppmi);
  const auto cols = static_cast<Eigen::Index>(ppmi.cols);
  constexpr std::size_t kOversample = 10;
  constexpr int kPowerIterations = 6;
  const std::size_t l = d + kOversample;

  Eigen::MatrixXd u;
  Eigen::VectorXd sigma;
  if (l >= n || static_cast<Eigen::Index>(l) >= cols) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a), Eigen::ComputeThinU);
    u = svd.matrixU();
    sigma = svd.singularValues();
  } else {
    NormalSource normal(seed);
    Eigen::MatrixXd omega(cols, static_cast<Eigen::Index>(l));
    for (Eigen::Index c = 0; c < omega.cols(); ++c) {
      for (Eigen::Index r = 0; r < omega.rows(); ++r) omega(r, c) = normal.next();
    }
    Eigen::MatrixXd q = orthonormal_basis(a * omega);
    for (int it = 0; it < kPowerIterations; ++it) {
      const Eigen::MatrixXd z = orthonormal_basis(a.transpose() * q);
      q = orthonormal_basis(a * z);
    }
    const Eigen::MatrixXd b = (a.transpose() * q).transpose();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU);
    u = q * svd.matrixU();
    sigma = svd.singularValues();
  }

  std::vector<double> out(n * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    Eigen::Index pivot = 0;
    for (Eigen::Index r = 1; r < u.rows(); ++r) {
      if (std::abs(u(r, col)) > std::abs(u(pivot, col))) pivot = r;
    }
    const double sign = u(pivot, col) < 0.0 ? -1.0 : 1.0;
    const double scale = std::sqrt(std::max(0.0, sigma(col)));
    for (std::size_t r = 0; r < n; ++r) out[r * d + j] = sign * u(static_cast<Eigen::Index>(r), col) * scale;
  }
  // Rows without any PPMI mass carry no information; keep them exactly zero.
  for (std::size_t r = 0; r < n; ++r) {
    if (ppmi.offsets[r] == ppmi.offsets[r + 1]) std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(r * d), d, 0.0);
  }
  return out;
}

EmbeddingMatrix build_embedding(const Corpus& corpus, std::shared_ptr<const Vocabulary> vocab, CorpusSide side,
                                std::size_t window, std::size_t d, std::uint64_t seed, unsigned threads) {
  if (!vocab) throw InvalidArgument("no vocabulary");
  EmbeddingMatrix emb;
  emb.side = side;
  emb.dim = d;
  emb.seed = seed;
  emb.window = window;
  emb.data = factorize(ppmi_transform(build_cooccurrence(corpus, *vocab, window, threads)), d, seed);
  emb.frequencies.assign(vocab->size(), 0);
  for (const auto& doc : corpus.docs) {
    for (const auto& token : doc.tokens) {
      if (auto id = vocab->find(token)) ++emb.frequencies[*id];
    }
  }
  emb.vocab = std::move(vocab);
  return emb;
}

bool EmbeddingMatrix::embeddable(WordId w) const {
  const auto r = row(w);
  return std::any_of(r.begin(), r.end(), [](double x) { return x != 0.0; });
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw InvalidArgument("cosine: dimension mismatch");
  const double norm_u = std::sqrt(dot(u.data(), u.data(), u.size()));
  const double norm_v = std::sqrt(dot(v.data(), v.data(), v.size()));
  return cosine_from(dot(u.data(), v.data(), u.size()), norm_u, norm_v);
}

double NeighborList::norm() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.similarity * e.similarity;
  return std::sqrt(s);
}

NeighborList nearest_neighbors(WordId w, const EmbeddingMatrix& emb, std::size_t k) {
  if (w >= emb.rows()) throw UnknownWord("#" + std::to_string(w));
  return scan_neighbors(w, emb, row_norms(emb), k);
}

NeighborIndex::NeighborIndex(const EmbeddingMatrix& emb, std::size_t k, unsigned threads) : k_(k) {
  const auto norms = row_norms(emb);
  lists_.resize(norms.size());
  parallel_for(norms.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) lists_[w] = scan_neighbors(static_cast<WordId>(w), emb, norms, k);
  });
}

}  // namespace jargon
