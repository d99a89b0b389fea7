// SPDX-License-Identifier: Apache-2.0
#include <ptc/error.hpp>
#include <ptc/nmt/checkpoint.hpp>

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ptc::nmt {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes little-endian");

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string header_text(const Model &m) {
  const ModelConfig &c = m.config;
  std::ostringstream h;
  h << "embed_dim " << c.embed_dim << '\n'
    << "hidden_dim " << c.hidden_dim << '\n'
    << "source_vocab_size " << c.source_vocab_size << '\n'
    << "target_vocab_size " << c.target_vocab_size << '\n'
    << "attention_dim " << c.attention_dim << '\n'
    << "max_decode_length " << c.max_decode_length << '\n'
    << "init_range " << format_double(c.init_range) << '\n'
    << "seed " << c.seed << '\n'
    << "lexicon";
  for (const auto &s : m.lexicon.syllables())
    h << ' ' << s;
  h << '\n';
  m.params.for_each([&](std::string_view name, const Eigen::MatrixXd &t) {
    h << "tensor " << name << ' ' << t.rows() << ' ' << t.cols() << '\n';
  });
  return h.str();
}

template <typename T> T parse_number(const std::string &word, const std::string &key) {
  T v{};
  auto res = std::from_chars(word.data(), word.data() + word.size(), v);
  if (res.ec != std::errc() || res.ptr != word.data() + word.size())
    throw Error("checkpoint: bad value '" + word + "' for " + key);
  return v;
}

} // namespace

void write_checkpoint(const Model &m, std::ostream &out) {
  if (!m.params.same_shape(Parameters::zeros(m.config)))
    throw Error("checkpoint: parameter shapes do not match the config");
  if (m.config.target_vocab_size != m.lexicon.target_vocab_size())
    throw Error("checkpoint: lexicon size does not match the target vocabulary");
  const std::string header = header_text(m);
  out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
  const auto len = static_cast<std::uint32_t>(header.size());
  out.write(reinterpret_cast<const char *>(&len), sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  m.params.for_each([&](std::string_view, const Eigen::MatrixXd &t) {
    out.write(reinterpret_cast<const char *>(t.data()),
              static_cast<std::streamsize>(t.size() * sizeof(double)));
  });
  if (!out)
    throw Error("checkpoint: write failed");
}

void save_checkpoint(const Model &model, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(model, out);
}

Model read_checkpoint(std::istream &in) {
  char magic[6] = {};
  in.read(magic, sizeof magic);
  if (in.gcount() != sizeof magic || std::string_view(magic, sizeof magic) != kCheckpointMagic)
    throw Error("checkpoint: bad magic, expected " + std::string(kCheckpointMagic));
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char *>(&len), sizeof len);
  if (in.gcount() != sizeof len)
    throw Error("checkpoint: truncated header length");
  std::string header(len, '\0');
  in.read(header.data(), len);
  if (static_cast<std::uint32_t>(in.gcount()) != len)
    throw Error("checkpoint: truncated header");

  Model m;
  std::vector<std::string> syllables;
  bool have_lexicon = false;
  std::vector<std::tuple<std::string, Eigen::Index, Eigen::Index>> manifest;
  std::istringstream lines(header);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream ws(line);
    std::string key;
    ws >> key;
    std::vector<std::string> words;
    for (std::string w; ws >> w;)
      words.push_back(w);
    auto one = [&]() -> const std::string & {
      if (words.size() != 1)
        throw Error("checkpoint: expected one value for " + key);
      return words[0];
    };
    ModelConfig &c = m.config;
    if (key == "embed_dim")
      c.embed_dim = parse_number<int>(one(), key);
    else if (key == "hidden_dim")
      c.hidden_dim = parse_number<int>(one(), key);
    else if (key == "source_vocab_size")
      c.source_vocab_size = parse_number<int>(one(), key);
    else if (key == "target_vocab_size")
      c.target_vocab_size = parse_number<int>(one(), key);
    else if (key == "attention_dim")
      c.attention_dim = parse_number<int>(one(), key);
    else if (key == "max_decode_length")
      c.max_decode_length = parse_number<int>(one(), key);
    else if (key == "init_range")
      c.init_range = parse_number<double>(one(), key);
    else if (key == "seed")
      c.seed = parse_number<std::uint64_t>(one(), key);
    else if (key == "lexicon") {
      syllables = words;
      have_lexicon = true;
    } else if (key == "tensor") {
      if (words.size() != 3)
        throw Error("checkpoint: malformed tensor line '" + line + "'");
      manifest.emplace_back(words[0], parse_number<Eigen::Index>(words[1], key),
                            parse_number<Eigen::Index>(words[2], key));
    } else
      throw Error("checkpoint: unknown header key '" + key + "'");
  }
  if (!have_lexicon)
    throw Error("checkpoint: header has no lexicon");
  m.lexicon = Lexicon::from_syllables(syllables);
  if (m.lexicon.target_vocab_size() != m.config.target_vocab_size)
    throw Error("checkpoint: lexicon size does not match target_vocab_size");
  m.params = Parameters::zeros(m.config);
  if (manifest.size() != m.params.tensor_count())
    throw Error("checkpoint: expected " + std::to_string(m.params.tensor_count()) +
                " tensors, header lists " + std::to_string(manifest.size()));

  std::size_t k = 0;
  m.params.for_each([&](std::string_view name, Eigen::MatrixXd &t) {
    const auto &[mname, rows, cols] = manifest[k++];
    if (mname != name || rows != t.rows() || cols != t.cols())
      throw Error("checkpoint: tensor " + mname + " " + std::to_string(rows) + "x" +
                  std::to_string(cols) + " inconsistent with config (expected " +
                  std::string(name) + " " + std::to_string(t.rows()) + "x" +
                  std::to_string(t.cols()) + ")");
    const auto bytes = static_cast<std::streamsize>(t.size() * sizeof(double));
    in.read(reinterpret_cast<char *>(t.data()), bytes);
    if (in.gcount() != bytes)
      throw Error("checkpoint: truncated data in tensor " + std::string(name));
  });
  if (in.peek() != std::char_traits<char>::eof())
    throw Error("checkpoint: trailing bytes after tensor data");
  return m;
}

Model load_checkpoint(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

} // namespace ptc::nmt
