// SPDX-License-Identifier: Apache-2.0
/**
 * @file   checkpoint.hpp
 * @brief  Binary model files.
 *
 * Layout (little-endian): the magic `KNPTC1`, a u32 byte count, a UTF-8 text
 * header of `key value` lines (config fields, the lexicon, then one
 * `tensor name rows cols` line per tensor in manifest order), and finally the
 * tensor values as f64 in column-major order.
 */
#pragma once

#include <ptc/lexicon.hpp>
#include <ptc/nmt/parameters.hpp>

#include <filesystem>
#include <iosfwd>

namespace ptc::nmt {

inline constexpr std::string_view kCheckpointMagic = "KNPTC1";

struct Model {
  ModelConfig config;
  Parameters params;
  Lexicon lexicon;
};

void save_checkpoint(const Model &model, const std::filesystem::path &path);
void write_checkpoint(const Model &model, std::ostream &out);

/// Config and shapes come from the file. Throws ptc::Error on a wrong magic,
/// truncation or inconsistent shapes.
Model load_checkpoint(const std::filesystem::path &path);
Model read_checkpoint(std::istream &in);

} // namespace ptc::nmt
