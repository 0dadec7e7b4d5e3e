#include <bit>
#include <cstdlib>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "nlsim/measures.hpp"

namespace nlsim {

namespace {

static_assert(std::endian::native == std::endian::little,
              "ensemble I/O assumes a little-endian host");

using json = nlohmann::json;

json params_json(const std::optional<ModelParams>& p) {
  if (!p) return nullptr;
  return json{{"d", p->d}, {"p", p->p}, {"alpha", p->alpha}, {"sigma_max", p->sigma_max}};
}

}  // namespace

std::string creation_timestamp() {
  std::time_t t = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) t = std::strtoll(env, nullptr, 10);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_ensemble(const std::string& path, const Ensemble& e) {
  for (const auto& s : e.samples)
    require(s.N() == e.N && s.d == e.d, "write_ensemble: samples do not share the basis");
  json header{{"format_version", kEnsembleFormatVersion},
              {"N", e.N},
              {"d", e.d},
              {"count", e.size()},
              {"seed", e.seed},
              {"seeds", e.seeds},
              {"params", params_json(e.params)},
              {"created", e.created}};
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("write_ensemble: cannot open " + path);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& s : e.samples)
    out.write(reinterpret_cast<const char*>(s.coeffs.data()),
              static_cast<std::streamsize>(s.coeffs.size() * sizeof(cplx)));
  if (!out) throw ValidationError("write_ensemble: write failed for " + path);
}

Ensemble read_ensemble(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("read_ensemble: cannot open " + path);
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1ULL << 32)) throw ValidationError("read_ensemble: bad header length in " + path);
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  json header;
  try {
    header = json::parse(text);
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("read_ensemble: malformed header: ") + ex.what());
  }
  if (header.value("format_version", -1) != kEnsembleFormatVersion)
    throw ValidationError("read_ensemble: unsupported format version in " + path);
  Ensemble e;
  e.N = header.at("N").get<int>();
  e.d = header.at("d").get<int>();
  e.seed = header.at("seed").get<std::uint64_t>();
  e.seeds = header.at("seeds").get<std::vector<std::uint64_t>>();
  e.created = header.value("created", "");
  const auto count = header.at("count").get<std::size_t>();
  if (e.seeds.size() != count) throw ValidationError("read_ensemble: seed list length mismatch");
  if (const auto& p = header.at("params"); !p.is_null())
    e.params = ModelParams::make(p.at("d").get<int>(), p.at("p").get<double>());
  e.samples.resize(count);
  for (auto& s : e.samples) {
    s = SpectralField::zero(e.d, e.N);
    in.read(reinterpret_cast<char*>(s.coeffs.data()),
            static_cast<std::streamsize>(s.coeffs.size() * sizeof(cplx)));
  }
  if (!in) throw ValidationError("read_ensemble: truncated payload in " + path);
  return e;
}

}  // namespace nlsim
