#include "swarm/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace swarm {

namespace {

constexpr char kMagic[8] = {'S', 'W', 'R', 'L', 'C', 'K', 'P', 'T'};
constexpr uint32_t kVersion = 1;

// This format is little-endian on disk; the project targets little-endian
// hosts, so values are written byte-for-byte.
static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T take(std::istream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return v;
}

void put_string(std::ostream& out, const std::string& s) {
  put<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string take_string(std::istream& in) {
  const uint32_t n = take<uint32_t>(in);
  if (n > (1u << 24)) throw std::runtime_error("checkpoint: implausible string length");
  std::string s(n, '\0');
  in.read(s.data(), n);
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  return s;
}

void put_tensor_section(std::ostream& out,
                        const std::vector<std::pair<std::string, Tensor>>& sec) {
  put<uint32_t>(out, static_cast<uint32_t>(sec.size()));
  for (const auto& [name, t] : sec) {
    put_string(out, name);
    put<uint32_t>(out, static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) put<uint32_t>(out, static_cast<uint32_t>(d));
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(float)));
  }
}

std::vector<std::pair<std::string, Tensor>> take_tensor_section(std::istream& in) {
  const uint32_t count = take<uint32_t>(in);
  if (count > (1u << 20)) throw std::runtime_error("checkpoint: implausible tensor count");
  std::vector<std::pair<std::string, Tensor>> sec;
  sec.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    std::string name = take_string(in);
    const uint32_t rank = take<uint32_t>(in);
    if (rank > 8) throw std::runtime_error("checkpoint: implausible tensor rank");
    std::vector<int> shape(rank);
    for (auto& d : shape) d = static_cast<int>(take<uint32_t>(in));
    Tensor t = Tensor::zeros(shape);
    in.read(reinterpret_cast<char*>(t.data.data()),
            static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    sec.emplace_back(std::move(name), std::move(t));
  }
  return sec;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  put<uint32_t>(out, ck.version);
  put<uint64_t>(out, static_cast<uint64_t>(ck.config_text.size()));
  out.write(ck.config_text.data(), static_cast<std::streamsize>(ck.config_text.size()));
  put<uint64_t>(out, ck.iteration);
  put_tensor_section(out, ck.tensors);
  put_tensor_section(out, ck.adam_m);
  put_tensor_section(out, ck.adam_v);
  put<uint64_t>(out, ck.adam_t);
  put<uint32_t>(out, static_cast<uint32_t>(ck.rng_states.size()));
  for (const auto& [name, st] : ck.rng_states) {
    put_string(out, name);
    for (uint64_t w : st) put<uint64_t>(out, w);
  }
  if (!out) throw std::runtime_error("checkpoint: write failed for '" + path + "'");
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("checkpoint: bad magic in '" + path + "'");
  Checkpoint ck;
  ck.version = take<uint32_t>(in);
  if (ck.version != kVersion)
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(ck.version));
  const uint64_t cfg_len = take<uint64_t>(in);
  if (cfg_len > (1ull << 24)) throw std::runtime_error("checkpoint: implausible config length");
  ck.config_text.resize(cfg_len);
  in.read(ck.config_text.data(), static_cast<std::streamsize>(cfg_len));
  if (!in) throw std::runtime_error("checkpoint: truncated file");
  ck.iteration = take<uint64_t>(in);
  ck.tensors = take_tensor_section(in);
  ck.adam_m = take_tensor_section(in);
  ck.adam_v = take_tensor_section(in);
  ck.adam_t = take<uint64_t>(in);
  const uint32_t nrng = take<uint32_t>(in);
  if (nrng > (1u << 20)) throw std::runtime_error("checkpoint: implausible rng count");
  for (uint32_t i = 0; i < nrng; ++i) {
    std::string name = take_string(in);
    std::array<uint64_t, 4> st;
    for (auto& w : st) w = take<uint64_t>(in);
    ck.rng_states.emplace_back(std::move(name), st);
  }
  return ck;
}

void load_params(ParamSet& params,
                 const std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::vector<std::string> missing, unexpected, mismatched;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto& name = params.at(i).name;
    bool found = false;
    for (const auto& [n, t] : tensors)
      if (n == name) {
        found = true;
        if (t.shape != params.at(i).value.shape)
          mismatched.push_back(name + " " + t.shape_str() + " vs " +
                               params.at(i).value.shape_str());
      }
    if (!found) missing.push_back(name);
  }
  for (const auto& [n, t] : tensors)
    if (!params.find(n)) unexpected.push_back(n);
  if (!missing.empty() || !unexpected.empty() || !mismatched.empty()) {
    std::ostringstream os;
    os << "checkpoint: tensor inventory does not match the architecture;";
    if (!missing.empty()) {
      os << " missing:";
      for (const auto& n : missing) os << " " << n;
      os << ";";
    }
    if (!unexpected.empty()) {
      os << " unexpected:";
      for (const auto& n : unexpected) os << " " << n;
      os << ";";
    }
    if (!mismatched.empty()) {
      os << " shape mismatch:";
      for (const auto& n : mismatched) os << " " << n;
    }
    throw std::runtime_error(os.str());
  }
  for (const auto& [n, t] : tensors) params.find(n)->value = t;
}

Checkpoint snapshot(const std::string& config_text, uint64_t iteration, const ParamSet& params,
                    const AdamState& adam) {
  Checkpoint ck;
  ck.config_text = config_text;
  ck.iteration = iteration;
  for (size_t i = 0; i < params.size(); ++i)
    ck.tensors.emplace_back(params.at(i).name, params.at(i).value);
  for (size_t i = 0; i < params.size(); ++i) {
    ck.adam_m.emplace_back(params.at(i).name, adam.m[i]);
    ck.adam_v.emplace_back(params.at(i).name, adam.v[i]);
  }
  ck.adam_t = static_cast<uint64_t>(adam.t);
  return ck;
}

void restore_adam(AdamState& adam, const Checkpoint& ck) {
  if (ck.adam_m.size() != adam.m.size() || ck.adam_v.size() != adam.v.size())
    throw std::runtime_error("checkpoint: adam state count mismatch");
  for (size_t i = 0; i < adam.m.size(); ++i) {
    if (ck.adam_m[i].second.shape != adam.m[i].shape)
      throw std::runtime_error("checkpoint: adam moment shape mismatch at " + ck.adam_m[i].first);
    adam.m[i] = ck.adam_m[i].second;
    adam.v[i] = ck.adam_v[i].second;
  }
  adam.t = static_cast<int64_t>(ck.adam_t);
}

}  // namespace swarm
