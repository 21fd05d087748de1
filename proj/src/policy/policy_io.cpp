#include "mci/policy_io.hpp"
#include "mci/error.hpp"

#include "json.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace mci {

namespace {

constexpr char kMagic[8] = {'M', 'C', 'I', 'P', 'O', 'L', 'v', '1'};

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const std::string& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string serialize_policy(const PolicySpec& spec) {
  const nlohmann::json header = {{"kind", to_string(spec.kind)},
                                 {"max_patients", spec.caps.max_patients},
                                 {"max_hospitals", spec.caps.max_hospitals},
                                 {"hidden", spec.hidden},
                                 {"reward_scale", spec.reward_scale},
                                 {"training_seed", spec.training_seed},
                                 {"parameter_count", spec.parameters.size()}};
  const std::string text = header.dump();
  std::string out(kMagic, sizeof kMagic);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out += text;
  for (double p : spec.parameters) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(p)));
  return out;
}

PolicySpec parse_policy(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0)
    throw Error(ErrorCode::PolicyLoad, "not a policy file (bad magic)");
  const std::uint32_t header_len = get_u32(bytes, sizeof kMagic);
  const std::size_t body = sizeof kMagic + 4 + header_len;
  if (bytes.size() < body) throw Error(ErrorCode::PolicyLoad, "truncated policy header");
  PolicySpec spec;
  std::size_t count = 0;
  try {
    const auto header = nlohmann::json::parse(bytes.substr(sizeof kMagic + 4, header_len));
    const auto kind = policy_kind_from_string(header.at("kind").get<std::string>());
    if (!kind) throw Error(ErrorCode::PolicyLoad, "unknown policy kind");
    spec.kind = *kind;
    spec.caps = {header.at("max_patients").get<int>(), header.at("max_hospitals").get<int>()};
    spec.hidden = header.at("hidden").get<int>();
    spec.reward_scale = header.at("reward_scale").get<double>();
    spec.training_seed = header.at("training_seed").get<std::uint64_t>();
    count = header.at("parameter_count").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::PolicyLoad, std::string("malformed policy header: ") + e.what());
  }
  if (bytes.size() != body + 4 * count) throw Error(ErrorCode::PolicyLoad, "parameter blob length mismatch");
  spec.parameters.resize(count);
  for (std::size_t i = 0; i < count; ++i) spec.parameters[i] = std::bit_cast<float>(get_u32(bytes, body + 4 * i));
  if (spec.kind == PolicyKind::Learned && count != learned_parameter_count(spec.caps, spec.hidden))
    throw Error(ErrorCode::PolicyLoad, "parameter count does not match declared shape");
  return spec;
}

void save_policy(const PolicySpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Storage, "cannot write " + path.string());
  out << serialize_policy(spec);
}

PolicySpec load_policy(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_policy(ss.str());
}

Policy resolve_policy(const std::string& name) {
  if (name == "random") return Policy::random();
  if (name == "greedy") return Policy::greedy();
  return Policy::learned(load_policy(name));
}

}  // namespace mci
