#pragma once

#include <iosfwd>
#include <string>

#include "citemb/sgns.hpp"

namespace citemb {

// CEMB binary model format, little-endian throughout:
//   magic "CEMB", u16 version (=1), u16 flags (bit 0: aligned),
//   i32 period, i32 frame_period, u32 dim, u64 vocab_size,
// then per token in id order:
//   u8 kind (0 word, 1 citation), u32 surface length, surface bytes,
//   u64 count, dim * f32 input vector.
// Output vectors are not persisted.
void write_model(std::ostream& out, const EmbeddingModel& model);
void write_model_file(const std::string& path, const EmbeddingModel& model);

EmbeddingModel read_model(std::istream& in); // throws BadModelFile
EmbeddingModel read_model_file(const std::string& path);

// word2vec-style text export: first line "|V| dim", then one token per line
// "surface v1 ... vd". Counts and the period are not representable here;
// re-import fills them with zeros and derives kinds from the surfaces.
void write_text_model(std::ostream& out, const EmbeddingModel& model);
EmbeddingModel read_text_model(std::istream& in);

} // namespace citemb
