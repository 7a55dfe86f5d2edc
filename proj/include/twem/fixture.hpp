#pragma once

#include <cstdint>
#include <string>

namespace twem {

// Writes a 200-example 2-class synthetic corpus (corpus.csv), a small
// covering embedding file (embeddings.txt, dim 16) and a ready-to-run
// config.json into `out_dir`. Class "signal" texts contain tokens from a
// designated lexicon that never appear in class "background" texts, so a
// unigram rule separates the classes perfectly; the generator verifies this
// before returning. Byte-identical for a fixed seed.
void make_fixture(const std::string& out_dir, uint64_t seed);

}  // namespace twem
