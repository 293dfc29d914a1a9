#include "dtids/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string_view>

#include "dtids/error.hpp"
#include "dtids/text.hpp"

namespace dtids {

namespace {

constexpr std::string_view kMagic = "DTIDSCKP";

class Writer {
 public:
  void bytes(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void text64(std::string_view s) {
    u64(s.size());
    bytes(s);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  void need(std::uint64_t n) const {
    if (n > in_.size() - pos_) throw FormatError("checkpoint is truncated");
  }
  std::string bytes(std::uint64_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string text64() { return bytes(u64()); }
  bool done() const { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

std::string listing(const Network& net) { return join(net.layer_specs(), "\n") + "\n"; }

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(Network& net) {
  Writer w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  w.u8('L');
  w.text64(net.spec().to_text());
  w.text64(listing(net));
  const auto slots = net.params();
  w.u64(slots.size());
  for (const auto& slot : slots) {
    w.u32(static_cast<std::uint32_t>(slot.name.size()));
    w.bytes(slot.name);
    const auto& shape = slot.value->shape();
    w.u32(static_cast<std::uint32_t>(shape.size()));
    for (auto e : shape) w.u64(e);
    for (double v : slot.value->data()) w.f64(v);
  }
  return w.take();
}

Network deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (bytes.size() < kMagic.size() || r.bytes(kMagic.size()) != kMagic) {
    throw FormatError("not a dtids checkpoint (bad magic)");
  }
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  if (r.u8() != 'L') throw FormatError("unsupported checkpoint byte order");

  ArchSpec spec;
  try {
    spec = ArchSpec::from_text(r.text64());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint architecture: ") + e.what());
  }
  Network net = build_network(spec);
  if (r.text64() != listing(net)) {
    throw FormatError("checkpoint layer listing does not match its architecture spec");
  }

  auto slots = net.params();
  const auto count = r.u64();
  if (count != slots.size()) {
    throw FormatError("checkpoint has " + std::to_string(count) + " parameter records, expected " +
                      std::to_string(slots.size()));
  }
  for (auto& slot : slots) {
    const auto name = r.bytes(r.u32());
    if (name != slot.name) {
      throw FormatError("checkpoint record '" + name + "' where '" + slot.name + "' was expected");
    }
    const auto rank = r.u32();
    Shape shape;
    for (std::uint32_t i = 0; i < rank; ++i) shape.push_back(r.u64());
    if (shape != slot.value->shape()) {
      throw FormatError("checkpoint record '" + name + "' has shape " + shape_string(shape) +
                        ", expected " + shape_string(slot.value->shape()));
    }
    for (auto& v : slot.value->data()) v = r.f64();
  }
  if (!r.done()) throw FormatError("trailing bytes after checkpoint records");
  return net;
}

void save_checkpoint(Network& net, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(net);
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

}  // namespace dtids
