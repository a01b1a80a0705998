#pragma once

// Binary checkpoint: "RAPD" magic, format version, config hash and text,
// variant/phase tags, named parameters (little-endian f64), Adam state, RNG
// state and the update index.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rapida/rma.hpp"

namespace rapida::cli {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string config_hash;
  std::string config_text;
  rma::Networks nets;
  tensor::AdamState optimizer;
  std::string rng_state;
  std::int64_t update_index = 0;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string serialize_checkpoint(const Checkpoint& ckpt);
// `source` names the data in diagnostics.
Checkpoint deserialize_checkpoint(const std::string& bytes, const std::string& source = "<bytes>");

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// Bitwise parameter equality (names, shapes and values).
bool same_parameters(const rma::Networks& a, const rma::Networks& b);

}  // namespace rapida::cli
