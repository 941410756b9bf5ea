#pragma once

#include <filesystem>
#include <iosfwd>

#include "ontolink/snore.hpp"

namespace ontolink {

// Binary sidecar: magic "OLSNORE1", counts, fit parameters and seed, feature
// names, then the CSR payload (row offsets, column ids, values).
void write_embedding(std::ostream& out, const SparseEmbedding& embedding);
void write_embedding(const std::filesystem::path& path, const SparseEmbedding& embedding);
SparseEmbedding read_embedding(std::istream& in);
SparseEmbedding read_embedding(const std::filesystem::path& path);

// `node<TAB>feature<TAB>value` per stored entry.
void write_embedding_text(std::ostream& out, const SparseEmbedding& embedding);

}  // namespace ontolink
