#include "vmblab/checkpoint.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vmblab/error.hpp"
#include "vmblab/hashing.hpp"

namespace vmb {
namespace container {
namespace {

constexpr char kMagic[8] = {'V', 'M', 'B', 'C', 'K', 'P', 'T', '\0'};
constexpr std::size_t kNameLen = 16;
constexpr std::size_t kEntry = kNameLen + 8 + 8 + 32;
constexpr std::size_t kHeader = 8 + 4 + 4 + 4;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
std::uint64_t get_le(const std::string& in, std::size_t pos, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  return v;
}
void put_f64(std::string& out, double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  put_u64(out, v);
}
double get_f64(const std::string& in, std::size_t pos) {
  const std::uint64_t v = get_le(in, pos, 8);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}

}  // namespace

std::string encode(const std::vector<Section>& sections) {
  std::string out(kMagic, 8);
  put_u32(out, kVersion);
  put_u32(out, kEndianTag);
  put_u32(out, static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = kHeader + kEntry * sections.size();
  for (const auto& s : sections) {
    if (s.name.empty() || s.name.size() >= kNameLen) throw ArgumentError("section name '" + s.name + "' too long");
    std::string name = s.name;
    name.resize(kNameLen, '\0');
    out += name;
    put_u64(out, offset);
    put_u64(out, s.bytes.size());
    const Digest d = sha256(s.bytes);
    out.append(reinterpret_cast<const char*>(d.data()), d.size());
    offset += s.bytes.size();
  }
  for (const auto& s : sections) out += s.bytes;
  return out;
}

std::vector<Section> decode(const std::string& data) {
  if (data.size() < kHeader) throw CheckpointError("checkpoint truncated: header incomplete");
  if (std::memcmp(data.data(), kMagic, 8) != 0) throw CheckpointError("not a checkpoint file (bad magic)");
  const auto version = get_le(data, 8, 4);
  if (version != kVersion) throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  if (get_le(data, 12, 4) != kEndianTag) throw CheckpointError("checkpoint endianness tag mismatch");
  const auto count = get_le(data, 16, 4);
  if (data.size() < kHeader + kEntry * count) throw CheckpointError("checkpoint truncated: section table incomplete");
  std::vector<Section> out;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t e = kHeader + kEntry * i;
    std::string name = data.substr(e, kNameLen);
    name.resize(std::strlen(name.c_str()));
    const auto off = get_le(data, e + kNameLen, 8), size = get_le(data, e + kNameLen + 8, 8);
    if (off > data.size() || size > data.size() - off)
      throw CheckpointError("checkpoint truncated: section '" + name + "' extends past end of file");
    Section s{name, data.substr(off, size)};
    const Digest d = sha256(s.bytes);
    if (std::memcmp(d.data(), data.data() + e + kNameLen + 16, d.size()) != 0)
      throw CheckpointError("checkpoint section '" + name + "' is corrupted (hash mismatch)");
    out.push_back(std::move(s));
  }
  return out;
}

void write_file(const std::string& path, const std::vector<Section>& sections) {
  const std::string bytes = encode(sections);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw CheckpointError("cannot open '" + tmp + "' for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw CheckpointError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place at '" + path + "': " + ec.message());
}

std::vector<Section> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode(ss.str());
}

const Section& find(const std::vector<Section>& sections, const std::string& name) {
  for (const auto& s : sections)
    if (s.name == name) return s;
  throw CheckpointError("checkpoint has no section '" + name + "'");
}

std::string pack_matrix(const Eigen::MatrixXcd& m) {
  std::string out;
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      put_f64(out, m(r, c).real());
      put_f64(out, m(r, c).imag());
    }
  return out;
}

Eigen::MatrixXcd unpack_complex(const std::string& b) {
  if (b.size() < 16) throw CheckpointError("matrix section too short");
  const auto rows = get_le(b, 0, 8), cols = get_le(b, 8, 8);
  if (b.size() != 16 + 16 * rows * cols) throw CheckpointError("matrix section has inconsistent size");
  Eigen::MatrixXcd m(rows, cols);
  std::size_t p = 16;
  for (std::uint64_t c = 0; c < cols; ++c)
    for (std::uint64_t r = 0; r < rows; ++r, p += 16) m(r, c) = {get_f64(b, p), get_f64(b, p + 8)};
  return m;
}

std::string pack_matrix(const Eigen::MatrixXd& m) {
  std::string out;
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) put_f64(out, m(r, c));
  return out;
}

Eigen::MatrixXd unpack_real(const std::string& b) {
  if (b.size() < 16) throw CheckpointError("matrix section too short");
  const auto rows = get_le(b, 0, 8), cols = get_le(b, 8, 8);
  if (b.size() != 16 + 8 * rows * cols) throw CheckpointError("matrix section has inconsistent size");
  Eigen::MatrixXd m(rows, cols);
  std::size_t p = 16;
  for (std::uint64_t c = 0; c < cols; ++c)
    for (std::uint64_t r = 0; r < rows; ++r, p += 8) m(r, c) = get_f64(b, p);
  return m;
}

}  // namespace container

namespace {

std::string hex_double(double x) {
  std::uint64_t v;
  std::memcpy(&v, &x, 8);
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

double parse_hex_double(const std::string& s) {
  std::uint64_t v = std::stoull(s, nullptr, 16);
  double x;
  std::memcpy(&x, &v, 8);
  return x;
}

std::string encode_meta(const CheckpointMeta& m) {
  std::ostringstream os;
  os << "system=" << m.system << "\n"
     << "time=" << hex_double(m.time) << "\n"
     << "eps=" << hex_double(m.eps) << "\n"
     << "dim=" << m.dim << "\n"
     << "modes=" << m.modes << "\n"
     << "order=" << m.order << "\n"
     << "basis=" << m.basis_hash << "\n"
     << "collision=" << m.collision_hash << "\n";
  return os.str();
}

CheckpointMeta decode_meta(const std::string& text) {
  CheckpointMeta m;
  std::istringstream is(text);
  std::string line;
  try {
    while (std::getline(is, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw CheckpointError("malformed checkpoint metadata line '" + line + "'");
      const std::string k = line.substr(0, eq), v = line.substr(eq + 1);
      if (k == "system") m.system = v;
      else if (k == "time") m.time = parse_hex_double(v);
      else if (k == "eps") m.eps = parse_hex_double(v);
      else if (k == "dim") m.dim = std::stoi(v);
      else if (k == "modes") m.modes = std::stoi(v);
      else if (k == "order") m.order = std::stoi(v);
      else if (k == "basis") m.basis_hash = v;
      else if (k == "collision") m.collision_hash = v;
    }
  } catch (const std::logic_error&) {
    throw CheckpointError("malformed checkpoint metadata");
  }
  return m;
}

void check_grid(const CheckpointMeta& m, const SpectralGrid& grid) {
  if (m.dim != grid.dim() || m.modes != grid.modes())
    throw CheckpointError("checkpoint grid " + std::to_string(m.dim) + "d/" + std::to_string(m.modes) +
                          " does not match the run grid " + std::to_string(grid.dim()) + "d/" +
                          std::to_string(grid.modes()));
}

}  // namespace

void save_checkpoint(const std::string& path, const KineticState& s, const SpectralGrid& grid,
                     const CollisionOperators& ops) {
  CheckpointMeta m{"kinetic", s.time, s.eps, grid.dim(), grid.modes(), ops.basis().order(), ops.basis().hash(),
                   ops.hash()};
  container::write_file(path, {{"meta", encode_meta(m)},
                               {"basis", ops.basis().spec_string()},
                               {"collision", ops.spec_string()},
                               {"G", container::pack_matrix(s.G)},
                               {"E", container::pack_matrix(s.E)},
                               {"B", container::pack_matrix(s.B)}});
}

KineticState load_checkpoint(const std::string& path, const SpectralGrid& grid, const CollisionOperators& ops) {
  const auto secs = container::read_file(path);
  const CheckpointMeta m = decode_meta(container::find(secs, "meta").bytes);
  if (m.system != "kinetic") throw CheckpointError("'" + path + "' holds a " + m.system + " state");
  if (m.basis_hash != ops.basis().hash() || container::find(secs, "basis").bytes != ops.basis().spec_string())
    throw CheckpointError("checkpoint basis '" + container::find(secs, "basis").bytes + "' does not match '" +
                          ops.basis().spec_string() + "'");
  if (m.collision_hash != ops.hash() || container::find(secs, "collision").bytes != ops.spec_string())
    throw CheckpointError("checkpoint collision operator does not match the run");
  check_grid(m, grid);
  KineticState s;
  s.time = m.time;
  s.eps = m.eps;
  s.G = container::unpack_complex(container::find(secs, "G").bytes);
  s.E = container::unpack_complex(container::find(secs, "E").bytes);
  s.B = container::unpack_complex(container::find(secs, "B").bytes);
  if (s.G.rows() != 2 * ops.size() || s.G.cols() != grid.size() || s.E.rows() != 3 || s.B.rows() != 3 ||
      s.E.cols() != grid.size() || s.B.cols() != grid.size())
    throw CheckpointError("checkpoint field shapes do not match the run");
  return s;
}

void save_fluid_checkpoint(const std::string& path, const FluidState& s, const SpectralGrid& grid) {
  CheckpointMeta m{"fluid", s.time, 0.0, grid.dim(), grid.modes(), 0, "", ""};
  container::write_file(path, {{"meta", encode_meta(m)},
                               {"u", container::pack_matrix(s.u)},
                               {"theta", container::pack_matrix(s.theta)},
                               {"n", container::pack_matrix(s.n)},
                               {"E", container::pack_matrix(s.E)},
                               {"B", container::pack_matrix(s.B)}});
}

FluidState load_fluid_checkpoint(const std::string& path, const SpectralGrid& grid) {
  const auto secs = container::read_file(path);
  const CheckpointMeta m = decode_meta(container::find(secs, "meta").bytes);
  if (m.system != "fluid") throw CheckpointError("'" + path + "' holds a " + m.system + " state");
  check_grid(m, grid);
  FluidState s;
  s.time = m.time;
  s.u = container::unpack_complex(container::find(secs, "u").bytes);
  s.theta = container::unpack_complex(container::find(secs, "theta").bytes);
  s.n = container::unpack_complex(container::find(secs, "n").bytes);
  s.E = container::unpack_complex(container::find(secs, "E").bytes);
  s.B = container::unpack_complex(container::find(secs, "B").bytes);
  for (const Eigen::MatrixXcd* f : {&s.u, &s.theta, &s.n, &s.E, &s.B})
    if (f->cols() != grid.size()) throw CheckpointError("checkpoint field shapes do not match the run");
  return s;
}

CheckpointMeta read_checkpoint_meta(const std::string& path) {
  return decode_meta(container::find(container::read_file(path), "meta").bytes);
}

bool load_cached_tensor(const std::string& dir, const std::string& spec_string, Eigen::MatrixXd& tensor) {
  const std::string path = dir + "/collision-" + to_hex(sha256(spec_string)).substr(0, 16) + ".bin";
  if (!std::filesystem::exists(path)) return false;
  const auto secs = container::read_file(path);
  if (container::find(secs, "collision").bytes != spec_string)
    throw CheckpointError("tensor cache '" + path + "' was built for a different collision spec");
  tensor = container::unpack_real(container::find(secs, "tensor").bytes);
  return true;
}

void store_cached_tensor(const std::string& dir, const std::string& spec_string, const Eigen::MatrixXd& tensor) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/collision-" + to_hex(sha256(spec_string)).substr(0, 16) + ".bin";
  container::write_file(path, {{"collision", spec_string}, {"tensor", container::pack_matrix(tensor)}});
}

}  // namespace vmb
