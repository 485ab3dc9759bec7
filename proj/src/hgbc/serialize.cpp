// Flat text model format, documented in docs/model_format.md.

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <system_error>

#include "greentune/common/error.hpp"
#include "greentune/hgbc/model.hpp"

namespace greentune::hgbc {

namespace {

constexpr const char* kMagic = "greentune-hgbc-model";
constexpr int kVersion = 1;

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw DataError("model file truncated");
    return w;
  }

  void expect(const std::string& keyword) {
    const std::string w = word();
    if (w != keyword) throw DataError("model file: expected '" + keyword + "', got '" + w + "'");
  }

  double real() {
    const std::string w = word();
    double v = 0.0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size()) {
      throw DataError("model file: bad number '" + w + "'");
    }
    return v;
  }

  long long integer() {
    const std::string w = word();
    long long v = 0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size()) {
      throw DataError("model file: bad integer '" + w + "'");
    }
    return v;
  }

  std::size_t count(std::size_t limit) {
    const long long v = integer();
    if (v < 0 || static_cast<unsigned long long>(v) > limit) {
      throw DataError("model file: count out of range");
    }
    return static_cast<std::size_t>(v);
  }

 private:
  std::istream& in_;
};

constexpr std::size_t kMaxCount = 1u << 28;

}  // namespace

void HgbcModel::save(std::ostream& out) const {
  out << kMagic << ' ' << kVersion << '\n';
  out << "params " << fmt(params_.learning_rate) << ' ' << params_.min_samples_leaf << ' '
      << params_.max_leaf_nodes << ' ' << fmt(params_.l2) << ' ' << params_.max_bins << ' '
      << params_.n_trees << '\n';
  out << "features " << n_features_ << '\n';
  out << "classes " << classes_.size();
  for (int c : classes_) out << ' ' << c;
  out << '\n';
  out << "baseline";
  for (double b : baseline_) out << ' ' << fmt(b);
  out << '\n';
  for (std::size_t f = 0; f < mapper_.n_features(); ++f) {
    const auto& t = mapper_.thresholds(f);
    out << "bins " << f << ' ' << t.size();
    for (double v : t) out << ' ' << fmt(v);
    out << '\n';
  }
  out << "trees " << trees_.size() << '\n';
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    const auto& nodes = trees_[i].nodes();
    out << "tree " << i << ' ' << nodes.size() << '\n';
    for (const TreeNode& n : nodes) {
      if (n.is_leaf()) {
        out << "L " << fmt(n.value) << ' ' << n.count << '\n';
      } else {
        out << "S " << n.feature << ' ' << static_cast<int>(n.bin) << ' ' << fmt(n.threshold)
            << ' ' << n.left << ' ' << n.right << ' ' << n.count << '\n';
      }
    }
  }
  out << "end\n";
}

HgbcModel HgbcModel::load(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  if (r.integer() != kVersion) throw DataError("unsupported model format version");

  HgbcModel m;
  r.expect("params");
  m.params_.learning_rate = r.real();
  m.params_.min_samples_leaf = static_cast<int>(r.integer());
  m.params_.max_leaf_nodes = static_cast<int>(r.integer());
  m.params_.l2 = r.real();
  m.params_.max_bins = static_cast<int>(r.integer());
  m.params_.n_trees = static_cast<int>(r.integer());

  r.expect("features");
  m.n_features_ = r.count(kMaxCount);
  r.expect("classes");
  m.classes_.resize(r.count(kMaxCount));
  for (int& c : m.classes_) c = static_cast<int>(r.integer());
  if (m.classes_.empty()) throw DataError("model file: no classes");
  r.expect("baseline");
  m.baseline_.resize(m.classes_.size());
  for (double& b : m.baseline_) b = r.real();

  std::vector<std::vector<double>> thresholds(m.n_features_);
  for (std::size_t f = 0; f < m.n_features_; ++f) {
    r.expect("bins");
    if (r.count(kMaxCount) != f) throw DataError("model file: bins out of order");
    thresholds[f].resize(r.count(254));
    for (double& t : thresholds[f]) t = r.real();
  }
  m.mapper_ = BinMapper(std::move(thresholds));

  r.expect("trees");
  m.trees_.resize(r.count(kMaxCount));
  if (m.trees_.size() % m.classes_.size() != 0) throw DataError("model file: ragged tree count");
  for (std::size_t i = 0; i < m.trees_.size(); ++i) {
    r.expect("tree");
    if (r.count(kMaxCount) != i) throw DataError("model file: trees out of order");
    std::vector<TreeNode> nodes(r.count(kMaxCount));
    if (nodes.empty()) throw DataError("model file: empty tree");
    for (std::size_t id = 0; id < nodes.size(); ++id) {
      TreeNode& n = nodes[id];
      const std::string kind = r.word();
      if (kind == "L") {
        n.value = r.real();
        n.count = static_cast<std::uint32_t>(r.integer());
      } else if (kind == "S") {
        n.feature = static_cast<int>(r.integer());
        n.bin = static_cast<BinIndex>(r.integer());
        n.threshold = r.real();
        n.left = static_cast<int>(r.integer());
        n.right = static_cast<int>(r.integer());
        n.count = static_cast<std::uint32_t>(r.integer());
        // Children always come after their parent, which rules out cycles.
        const auto size = static_cast<int>(nodes.size());
        const auto self = static_cast<int>(id);
        if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= m.n_features_ ||
            n.left <= self || n.right <= self || n.left >= size || n.right >= size) {
          throw DataError("model file: split node references are out of range");
        }
      } else {
        throw DataError("model file: unknown node kind '" + kind + "'");
      }
    }
    m.trees_[i] = Tree(std::move(nodes));
  }
  r.expect("end");
  return m;
}

void HgbcModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file " + path);
  save(out);
}

HgbcModel HgbcModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file " + path);
  return load(in);
}

}  // namespace greentune::hgbc
