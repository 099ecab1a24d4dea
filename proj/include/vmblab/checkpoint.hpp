#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vmblab/collision.hpp"
#include "vmblab/fluid.hpp"
#include "vmblab/kinetic.hpp"

namespace vmb {

/// Binary container: magic, version, endian tag, section table (name, offset, size,
/// SHA-256) followed by the payloads. Integers and doubles are little-endian.
namespace container {

constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kEndianTag = 0x01020304u;

struct Section {
  std::string name;  // at most 15 bytes
  std::string bytes;
};

std::string encode(const std::vector<Section>& sections);
/// Throws CheckpointError on bad magic/version/endianness, truncation, or a hash mismatch
/// (the message names the section).
std::vector<Section> decode(const std::string& data);

void write_file(const std::string& path, const std::vector<Section>& sections);
std::vector<Section> read_file(const std::string& path);

const Section& find(const std::vector<Section>& sections, const std::string& name);

std::string pack_matrix(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unpack_complex(const std::string& bytes);
std::string pack_matrix(const Eigen::MatrixXd& m);
Eigen::MatrixXd unpack_real(const std::string& bytes);

}  // namespace container

struct CheckpointMeta {
  std::string system;  // kinetic or fluid
  double time = 0, eps = 0;
  int dim = 0, modes = 0, order = 0;
  std::string basis_hash, collision_hash;
};

void save_checkpoint(const std::string& path, const KineticState& s, const SpectralGrid& grid,
                     const CollisionOperators& ops);
/// Refuses files whose basis or collision hash, or grid, differ from the given ones.
KineticState load_checkpoint(const std::string& path, const SpectralGrid& grid, const CollisionOperators& ops);

void save_fluid_checkpoint(const std::string& path, const FluidState& s, const SpectralGrid& grid);
FluidState load_fluid_checkpoint(const std::string& path, const SpectralGrid& grid);

CheckpointMeta read_checkpoint_meta(const std::string& path);

/// Collision tensor cache keyed by the collision spec hash. Returns false when absent.
bool load_cached_tensor(const std::string& dir, const std::string& spec_string, Eigen::MatrixXd& tensor);
void store_cached_tensor(const std::string& dir, const std::string& spec_string, const Eigen::MatrixXd& tensor);

}  // namespace vmb
