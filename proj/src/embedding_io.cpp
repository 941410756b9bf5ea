#include "ontolink/embedding_io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "ontolink/errors.hpp"

namespace ontolink {

namespace {

constexpr std::array<char, 8> kMagic = {'O', 'L', 'S', 'N', 'O', 'R', 'E', '1'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw Error("truncated embedding file");
  return value;
}

}  // namespace

void write_embedding(std::ostream& out, const SparseEmbedding& e) {
  const auto& m = e.rows;
  if (!m.isCompressed()) throw PreconditionError("embedding must be compressed before writing");
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, e.node_count());
  put<std::uint64_t>(out, e.feature_count());
  put<std::uint64_t>(out, e.nnz());
  put<std::int32_t>(out, e.params.walks_per_node);
  put<std::int32_t>(out, e.params.max_len);
  put<double>(out, e.params.threshold);
  put<std::int32_t>(out, e.params.nnz_cap_per_node);
  put<std::uint64_t>(out, e.params.hash_buckets);
  put<std::uint64_t>(out, e.params.seed);
  for (const auto& name : e.feature_names) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
  }
  for (Eigen::Index i = 0; i <= m.rows(); ++i) put<std::int64_t>(out, m.outerIndexPtr()[i]);
  for (std::size_t i = 0; i < e.nnz(); ++i) put<std::int32_t>(out, m.innerIndexPtr()[i]);
  for (std::size_t i = 0; i < e.nnz(); ++i) put<double>(out, m.valuePtr()[i]);
  if (!out) throw Error("failed writing embedding");
}

void write_embedding(const std::filesystem::path& path, const SparseEmbedding& e) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_embedding(out, e);
}

SparseEmbedding read_embedding(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw Error("not an ontolink embedding file");
  SparseEmbedding e;
  const auto n = get<std::uint64_t>(in);
  const auto features = get<std::uint64_t>(in);
  const auto nnz = get<std::uint64_t>(in);
  e.params.walks_per_node = get<std::int32_t>(in);
  e.params.max_len = get<std::int32_t>(in);
  e.params.threshold = get<double>(in);
  e.params.nnz_cap_per_node = get<std::int32_t>(in);
  e.params.hash_buckets = get<std::uint64_t>(in);
  e.params.seed = get<std::uint64_t>(in);
  if (features != n) throw Error("embedding feature count does not match node count");

  e.feature_names.reserve(features);
  for (std::uint64_t i = 0; i < features; ++i) {
    const auto len = get<std::uint32_t>(in);
    std::string name(len, '\0');
    if (!in.read(name.data(), len)) throw Error("truncated embedding file");
    e.feature_names.push_back(std::move(name));
  }

  std::vector<std::int64_t> offsets(n + 1);
  for (auto& o : offsets) o = get<std::int64_t>(in);
  if (offsets.front() != 0 || static_cast<std::uint64_t>(offsets.back()) != nnz) throw Error("corrupt embedding offsets");
  std::vector<std::int32_t> cols(nnz);
  for (auto& c : cols) {
    c = get<std::int32_t>(in);
    if (c < 0 || static_cast<std::uint64_t>(c) >= features) throw Error("corrupt embedding column id");
  }
  std::vector<double> values(nnz);
  for (auto& v : values) v = get<double>(in);

  e.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(features));
  Eigen::VectorXi per_row(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    if (offsets[i + 1] < offsets[i]) throw Error("corrupt embedding offsets");
    per_row[static_cast<Eigen::Index>(i)] = static_cast<int>(offsets[i + 1] - offsets[i]);
  }
  e.rows.reserve(per_row);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (auto k = offsets[i]; k < offsets[i + 1]; ++k) {
      e.rows.insert(static_cast<Eigen::Index>(i), cols[static_cast<std::size_t>(k)]) = values[static_cast<std::size_t>(k)];
    }
  }
  e.rows.makeCompressed();
  return e;
}

SparseEmbedding read_embedding(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_embedding(in);
}

void write_embedding_text(std::ostream& out, const SparseEmbedding& e) {
  for (Eigen::Index u = 0; u < e.rows.outerSize(); ++u) {
    for (SparseRows::InnerIterator it(e.rows, u); it; ++it) {
      out << e.feature_names[static_cast<std::size_t>(u)] << '\t'
          << e.feature_names[static_cast<std::size_t>(it.index())] << '\t' << it.value() << '\n';
    }
  }
}

}  // namespace ontolink
