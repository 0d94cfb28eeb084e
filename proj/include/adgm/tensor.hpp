#ifndef ADGM_TENSOR_HPP
#define ADGM_TENSOR_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace adgm {

// Coordinate-list tensor of order D with the same dimension n at every mode.
//
// Entries are (index tuple, value) pairs. Duplicates are allowed until
// canonicalize() is called, which sorts the tuples lexicographically, merges
// duplicates by summation and drops zeros. A canonical tensor additionally
// keeps, for every mode, a copy of its entries grouped by the index at that
// mode so that contractions with one mode left open are a single sequential
// pass.
//
// Mode numbers in the public API are 1-based; index components are 0-based.
template <typename Scalar_>
class SparseTensor {
 public:
  using Scalar = Scalar_;
  using Index = Eigen::Index;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  // Entries of one mode, grouped by the index at that mode. Entry k of group
  // j lives at position offsets[j] + k; its remaining order-1 indices are
  // stored contiguously in `others` in increasing mode order.
  struct ModeView {
    std::vector<std::int32_t> offsets;
    std::vector<std::int32_t> others;
    std::vector<Scalar> values;
  };

  SparseTensor() = default;

  SparseTensor(int order, Index dim) : order_(order), dim_(dim) {
    if (order < 0) throw std::invalid_argument("SparseTensor: negative order");
    if (dim <= 0) throw std::invalid_argument("SparseTensor: dimension must be positive");
    build_views();
  }

  int order() const { return order_; }
  Index dim() const { return dim_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  bool is_canonical() const { return canonical_; }

  void add(std::span<const Index> idx, Scalar value) {
    if (static_cast<int>(idx.size()) != order_) {
      throw std::invalid_argument("SparseTensor::add: expected " + std::to_string(order_) +
                                  " indices, got " + std::to_string(idx.size()));
    }
    for (std::size_t m = 0; m < idx.size(); ++m) {
      if (idx[m] < 0 || idx[m] >= dim_) {
        throw std::invalid_argument("SparseTensor::add: index " + std::to_string(idx[m]) +
                                    " at mode " + std::to_string(m + 1) + " outside [0," +
                                    std::to_string(dim_) + ")");
      }
      indices_.push_back(static_cast<std::int32_t>(idx[m]));
    }
    values_.push_back(value);
    invalidate();
  }

  void add(std::initializer_list<Index> idx, Scalar value) {
    add(std::span<const Index>(idx.begin(), idx.size()), value);
  }

  std::span<const std::int32_t> index(std::size_t e) const {
    return {indices_.data() + e * static_cast<std::size_t>(order_), static_cast<std::size_t>(order_)};
  }
  Scalar value(std::size_t e) const { return values_[e]; }

  // Applies f to every stored value. Structure is untouched, so the tensor
  // stops being canonical if it was.
  template <typename F>
  void transform_values(F f) {
    for (auto& v : values_) v = f(v);
    invalidate();
  }

  void canonicalize() {
    const std::size_t count = values_.size();
    const auto d = static_cast<std::size_t>(order_);
    std::vector<std::size_t> perm(count);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    auto tuple_less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(indices_.begin() + a * d, indices_.begin() + (a + 1) * d,
                                          indices_.begin() + b * d, indices_.begin() + (b + 1) * d);
    };
    std::stable_sort(perm.begin(), perm.end(), tuple_less);

    std::vector<std::int32_t> idx;
    std::vector<Scalar> val;
    idx.reserve(indices_.size());
    val.reserve(count);
    for (std::size_t k = 0; k < count;) {
      std::size_t e = perm[k];
      Scalar sum = values_[e];
      std::size_t next = k + 1;
      while (next < count && !tuple_less(e, perm[next])) sum += values_[perm[next++]];
      if (sum != Scalar(0)) {
        idx.insert(idx.end(), indices_.begin() + e * d, indices_.begin() + (e + 1) * d);
        val.push_back(sum);
      }
      k = next;
    }
    indices_ = std::move(idx);
    values_ = std::move(val);
    build_views();
    canonical_ = true;
  }

  // Requires a canonical tensor.
  const ModeView& mode_view(int mode) const {
    if (!canonical_) throw std::logic_error("SparseTensor::mode_view: tensor is not canonical");
    return views_.at(static_cast<std::size_t>(mode - 1));
  }

  friend bool operator==(const SparseTensor& a, const SparseTensor& b) {
    return a.order_ == b.order_ && a.dim_ == b.dim_ && a.indices_ == b.indices_ &&
           a.values_ == b.values_;
  }

 private:
  void invalidate() {
    canonical_ = false;
    views_.clear();
  }

  void build_views() {
    views_.assign(static_cast<std::size_t>(order_), ModeView{});
    const auto d = static_cast<std::size_t>(order_);
    const std::size_t count = values_.size();
    for (std::size_t m = 0; m < d; ++m) {
      ModeView& view = views_[m];
      view.offsets.assign(static_cast<std::size_t>(dim_) + 1, 0);
      for (std::size_t e = 0; e < count; ++e) ++view.offsets[indices_[e * d + m] + 1];
      std::partial_sum(view.offsets.begin(), view.offsets.end(), view.offsets.begin());
      view.others.resize(count * (d - 1));
      view.values.resize(count);
      std::vector<std::int32_t> cursor(view.offsets.begin(), view.offsets.end() - 1);
      for (std::size_t e = 0; e < count; ++e) {
        const auto slot = static_cast<std::size_t>(cursor[indices_[e * d + m]]++);
        view.values[slot] = values_[e];
        std::size_t w = slot * (d - 1);
        for (std::size_t o = 0; o < d; ++o) {
          if (o != m) view.others[w++] = indices_[e * d + o];
        }
      }
    }
  }

  int order_ = 0;
  Index dim_ = 1;
  std::vector<std::int32_t> indices_;
  std::vector<Scalar> values_;
  bool canonical_ = true;
  std::vector<ModeView> views_;
};

using SparseTensord = SparseTensor<double>;

namespace detail {

template <typename Scalar>
void check_length(const SparseTensor<Scalar>& F, Eigen::Index length, int mode, const char* what) {
  if (length != F.dim()) {
    throw std::invalid_argument(std::string(what) + ": vector for mode " + std::to_string(mode) +
                                " has length " + std::to_string(length) + ", expected " +
                                std::to_string(F.dim()));
  }
}

}  // namespace detail

// F(x_1, ..., x_D) = sum over entries of value * prod_d x_d[i_d].
template <typename Scalar>
Scalar multilinear_form(const SparseTensor<Scalar>& F,
                        std::span<const typename SparseTensor<Scalar>::Vector> xs) {
  if (static_cast<int>(xs.size()) != F.order()) {
    throw std::invalid_argument("multilinear_form: got " + std::to_string(xs.size()) +
                                " vectors for a tensor of order " + std::to_string(F.order()));
  }
  for (std::size_t m = 0; m < xs.size(); ++m) {
    detail::check_length(F, xs[m].size(), static_cast<int>(m + 1), "multilinear_form");
  }
  Scalar total(0);
  for (std::size_t e = 0; e < F.size(); ++e) {
    Scalar term = F.value(e);
    const auto idx = F.index(e);
    for (std::size_t m = 0; m < xs.size(); ++m) term *= xs[m][idx[m]];
    total += term;
  }
  return total;
}

// F(x, x, ..., x).
template <typename Scalar, typename Derived>
Scalar homogeneous_form(const SparseTensor<Scalar>& F, const Eigen::MatrixBase<Derived>& x) {
  detail::check_length(F, x.size(), 1, "homogeneous_form");
  Scalar total(0);
  for (std::size_t e = 0; e < F.size(); ++e) {
    Scalar term = F.value(e);
    for (auto i : F.index(e)) term *= x[i];
    total += term;
  }
  return total;
}

// Contraction along one mode: G_{...} = sum_{i_d} F_{..i_d..} v[i_d].
template <typename Scalar, typename Derived>
SparseTensor<Scalar> mode_product(const SparseTensor<Scalar>& F, int mode,
                                  const Eigen::MatrixBase<Derived>& v) {
  if (mode < 1 || mode > F.order()) {
    throw std::invalid_argument("mode_product: mode " + std::to_string(mode) +
                                " outside [1," + std::to_string(F.order()) + "]");
  }
  detail::check_length(F, v.size(), mode, "mode_product");
  SparseTensor<Scalar> G(F.order() - 1, F.dim());
  std::vector<Eigen::Index> rest(static_cast<std::size_t>(F.order() - 1));
  const auto open = static_cast<std::size_t>(mode - 1);
  for (std::size_t e = 0; e < F.size(); ++e) {
    const auto idx = F.index(e);
    const Scalar scale = v[idx[open]];
    if (scale == Scalar(0)) continue;
    std::size_t w = 0;
    for (std::size_t m = 0; m < idx.size(); ++m) {
      if (m != open) rest[w++] = idx[m];
    }
    G.add(std::span<const Eigen::Index>(rest), F.value(e) * scale);
  }
  G.canonicalize();
  return G;
}

// Gradient of the multilinear form with respect to the vector in `open_mode`:
// g[j] = sum over entries with i_{open} = j of value * prod_{m<open} left[m][i_m]
//        * prod_{m>open} right[m-open-1][i_m].
// Hence g . x == multilinear_form(F, left ++ [x] ++ right).
template <typename Scalar>
typename SparseTensor<Scalar>::Vector partial_contraction(
    const SparseTensor<Scalar>& F, int open_mode,
    std::span<const typename SparseTensor<Scalar>::Vector> left,
    std::span<const typename SparseTensor<Scalar>::Vector> right) {
  using Vector = typename SparseTensor<Scalar>::Vector;
  if (open_mode < 1 || open_mode > F.order()) {
    throw std::invalid_argument("partial_contraction: open mode " + std::to_string(open_mode) +
                                " outside [1," + std::to_string(F.order()) + "]");
  }
  if (static_cast<int>(left.size()) != open_mode - 1 ||
      static_cast<int>(right.size()) != F.order() - open_mode) {
    throw std::invalid_argument("partial_contraction: expected " + std::to_string(open_mode - 1) +
                                " left and " + std::to_string(F.order() - open_mode) +
                                " right vectors, got " + std::to_string(left.size()) + " and " +
                                std::to_string(right.size()));
  }
  std::vector<const Vector*> others;
  others.reserve(left.size() + right.size());
  int mode = 1;
  for (const auto& v : left) {
    detail::check_length(F, v.size(), mode++, "partial_contraction");
    others.push_back(&v);
  }
  ++mode;
  for (const auto& v : right) {
    detail::check_length(F, v.size(), mode++, "partial_contraction");
    others.push_back(&v);
  }

  Vector g = Vector::Zero(F.dim());
  const std::size_t rest = others.size();
  if (F.is_canonical()) {
    const auto& view = F.mode_view(open_mode);
    for (Eigen::Index j = 0; j < F.dim(); ++j) {
      Scalar acc(0);
      for (auto e = view.offsets[j]; e < view.offsets[j + 1]; ++e) {
        Scalar term = view.values[e];
        const std::int32_t* idx = view.others.data() + static_cast<std::size_t>(e) * rest;
        for (std::size_t o = 0; o < rest; ++o) term *= (*others[o])[idx[o]];
        acc += term;
      }
      g[j] = acc;
    }
  } else {
    const auto open = static_cast<std::size_t>(open_mode - 1);
    for (std::size_t e = 0; e < F.size(); ++e) {
      const auto idx = F.index(e);
      Scalar term = F.value(e);
      std::size_t o = 0;
      for (std::size_t m = 0; m < idx.size(); ++m) {
        if (m != open) term *= (*others[o++])[idx[m]];
      }
      g[idx[open]] += term;
    }
  }
  return g;
}

// Every entry is spread over all order! mode permutations with value/order!.
template <typename Scalar>
SparseTensor<Scalar> symmetrize(const SparseTensor<Scalar>& F) {
  SparseTensor<Scalar> S(F.order(), F.dim());
  std::vector<int> perm(static_cast<std::size_t>(F.order()));
  std::iota(perm.begin(), perm.end(), 0);
  Scalar copies(1);
  for (int k = 2; k <= F.order(); ++k) copies *= Scalar(k);
  std::vector<Eigen::Index> idx(perm.size());
  for (std::size_t e = 0; e < F.size(); ++e) {
    const auto src = F.index(e);
    const Scalar share = F.value(e) / copies;
    std::iota(perm.begin(), perm.end(), 0);
    do {
      for (std::size_t m = 0; m < perm.size(); ++m) idx[m] = src[perm[m]];
      S.add(std::span<const Eigen::Index>(idx), share);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  S.canonicalize();
  return S;
}

// Text format: header line `order D dim n`, then one `i_1 ... i_D value` line
// per entry. Blank lines and lines starting with '#' are skipped.
template <typename Scalar>
void write_tensor(std::ostream& os, const SparseTensor<Scalar>& F) {
  os << "order " << F.order() << " dim " << F.dim() << '\n';
  const auto old_precision = os.precision(17);
  for (std::size_t e = 0; e < F.size(); ++e) {
    for (auto i : F.index(e)) os << i << ' ';
    os << F.value(e) << '\n';
  }
  os.precision(old_precision);
}

// Reads a header and entry lines until end of stream or until the next line
// whose first character is a letter (which is left unread).
template <typename Scalar = double>
SparseTensor<Scalar> read_tensor(std::istream& is) {
  std::string line;
  auto skippable = [](const std::string& s) {
    const auto p = s.find_first_not_of(" \t\r");
    return p == std::string::npos || s[p] == '#';
  };
  while (std::getline(is, line) && skippable(line)) {
  }
  std::istringstream header(line);
  std::string k1, k2;
  int order = -1;
  Eigen::Index dim = 0;
  if (!(header >> k1 >> order >> k2 >> dim) || k1 != "order" || k2 != "dim") {
    throw std::invalid_argument("read_tensor: expected header `order D dim n`, got `" + line + "`");
  }
  SparseTensor<Scalar> F(order, dim);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(order));
  while (is.good()) {
    const int next = is.peek();
    if (next == std::char_traits<char>::eof() || std::isalpha(next)) break;
    std::getline(is, line);
    if (skippable(line)) continue;
    std::istringstream row(line);
    Scalar value;
    for (auto& i : idx) {
      if (!(row >> i)) throw std::invalid_argument("read_tensor: malformed entry `" + line + "`");
    }
    if (!(row >> value)) throw std::invalid_argument("read_tensor: missing value in `" + line + "`");
    F.add(std::span<const Eigen::Index>(idx), value);
  }
  F.canonicalize();
  return F;
}

}  // namespace adgm

#endif  // ADGM_TENSOR_HPP
