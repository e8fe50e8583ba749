#include <string>

#include "kpca/binary_stream.hpp"
#include "kpca/detectors.hpp"
#include "kpca/error.hpp"

namespace kpca {
namespace {

constexpr std::uint16_t kModelVersion = 1;
constexpr std::uint8_t kMapNone = 255;
constexpr std::uint8_t kMapRff = 0;
constexpr std::uint8_t kMapNystrom = 1;

void write_kernel(ByteWriter& w, const KernelSpec& k) {
  w.u8(static_cast<std::uint8_t>(k.base));
  w.f64(k.gamma);
  w.f64(k.coef);
  w.u32(k.degree);
  w.u8(k.cosine_prefix ? 1 : 0);
}

KernelSpec read_kernel(ByteReader& r) {
  KernelSpec k;
  const std::uint8_t base = r.u8();
  if (base > static_cast<std::uint8_t>(KernelBase::kCosine)) {
    fail(ErrorKind::kFormat, "unknown kernel code " + std::to_string(base));
  }
  k.base = static_cast<KernelBase>(base);
  k.gamma = r.f64();
  k.coef = r.f64();
  k.degree = r.u32();
  const std::uint8_t prefix = r.u8();
  if (prefix > 1) fail(ErrorKind::kFormat, "bad cosine prefix flag");
  k.cosine_prefix = prefix == 1;
  return k;
}

void write_subspace(ByteWriter& w, const SubspaceModel& s) {
  w.f64(s.evr_threshold);
  w.u64(s.q);
  w.f64_array(s.mean);
  w.matrix(s.projection);
  w.f64_array(s.spectrum);
}

SubspaceModel read_subspace(ByteReader& r) {
  SubspaceModel s;
  s.evr_threshold = r.f64();
  s.q = r.u64();
  s.mean = r.f64_array();
  s.projection = r.matrix();
  s.spectrum = r.f64_array();
  if (s.projection.rows() != s.mean.size() || s.projection.cols() != s.q ||
      s.spectrum.size() != s.mean.size()) {
    fail(ErrorKind::kFormat, "inconsistent subspace block shapes");
  }
  return s;
}

}  // namespace

std::vector<std::uint8_t> serialize_model(const DetectorModel& m) {
  ByteWriter w;
  w.magic("KPCM");
  w.u16(kModelVersion);
  w.u8(static_cast<std::uint8_t>(m.method));
  w.u64(m.seed);
  w.u64(m.dim);
  w.u64(m.n_train);
  w.f64(m.temperature);

  w.u8(m.clip_percentile ? 1 : 0);
  w.f64(m.clip_percentile.value_or(0.0));
  w.f64_array(m.clip_thresholds);

  write_kernel(w, m.kernel);
  if (m.rff) {
    w.u8(kMapRff);
    w.u64(m.rff->seed);
    write_kernel(w, m.rff->spec);
    w.matrix(m.rff->omega);
    w.f64_array(m.rff->phase);
  } else if (m.nystrom) {
    w.u8(kMapNystrom);
    w.u8(static_cast<std::uint8_t>(m.nystrom->sampling()));
    write_kernel(w, m.nystrom->spec());
    w.matrix(m.nystrom->landmarks());
    w.matrix(m.nystrom->basis());
    w.f64_array(m.nystrom->eigenvalues());
    w.u64(m.landmark_indices.size());
    for (std::uint64_t i : m.landmark_indices) w.u64(i);
  } else {
    w.u8(kMapNone);
  }

  w.u8(m.subspace ? 1 : 0);
  if (m.subspace) write_subspace(w, *m.subspace);
  w.matrix(m.knn_bank);
  return w.release();
}

DetectorModel deserialize_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("KPCM");
  const std::uint16_t version = r.u16();
  if (version != kModelVersion) {
    fail(ErrorKind::kFormat, "unsupported model file version " + std::to_string(version));
  }
  DetectorModel m;
  const std::uint8_t method = r.u8();
  if (method > static_cast<std::uint8_t>(Method::kEnergy)) {
    fail(ErrorKind::kFormat, "unknown method code " + std::to_string(method));
  }
  m.method = static_cast<Method>(method);
  m.seed = r.u64();
  m.dim = r.u64();
  m.n_train = r.u64();
  m.temperature = r.f64();

  const std::uint8_t has_clip = r.u8();
  const double percentile = r.f64();
  if (has_clip) m.clip_percentile = percentile;
  m.clip_thresholds = r.f64_array();

  m.kernel = read_kernel(r);
  const std::uint8_t map_kind = r.u8();
  if (map_kind == kMapRff) {
    RffMap rff;
    rff.seed = r.u64();
    rff.spec = read_kernel(r);
    rff.omega = r.matrix();
    rff.phase = r.f64_array();
    if (rff.phase.size() != rff.omega.rows()) fail(ErrorKind::kFormat, "inconsistent RFF block");
    m.rff = std::move(rff);
  } else if (map_kind == kMapNystrom) {
    const std::uint8_t sampling = r.u8();
    if (sampling > static_cast<std::uint8_t>(LandmarkSampling::kUniform)) {
      fail(ErrorKind::kFormat, "unknown sampling code " + std::to_string(sampling));
    }
    const KernelSpec spec = read_kernel(r);
    Matrix landmarks = r.matrix();
    Matrix basis = r.matrix();
    std::vector<double> values = r.f64_array();
    const std::uint64_t n = r.u64();
    if (n > r.remaining() / 8) fail(ErrorKind::kLength, "truncated landmark index list");
    m.landmark_indices.resize(n);
    for (auto& i : m.landmark_indices) i = r.u64();
    try {
      m.nystrom = NystromMap(spec, static_cast<LandmarkSampling>(sampling), std::move(landmarks),
                             std::move(basis), std::move(values));
    } catch (const Error& e) {
      fail(ErrorKind::kFormat, std::string("invalid Nystrom block: ") + e.what());
    }
  } else if (map_kind != kMapNone) {
    fail(ErrorKind::kFormat, "unknown map code " + std::to_string(map_kind));
  }

  if (r.u8() == 1) m.subspace = read_subspace(r);
  m.knn_bank = r.matrix();
  r.expect_end();

  const bool kpca = m.method == Method::kKpcaRff || m.method == Method::kKpcaNys;
  if ((kpca || m.method == Method::kPca) && !m.subspace) {
    fail(ErrorKind::kFormat, "model is missing its subspace block");
  }
  if (m.method == Method::kKpcaRff && !m.rff) fail(ErrorKind::kFormat, "kpca-rff model has no RFF map");
  if (m.method == Method::kKpcaNys && !m.nystrom) fail(ErrorKind::kFormat, "kpca-nys model has no Nystrom map");
  if (m.method == Method::kKnn && (m.knn_bank.empty() || m.knn_bank.cols() != m.dim)) {
    fail(ErrorKind::kFormat, "knn model bank does not match the model dimension");
  }
  if (!m.clip_thresholds.empty() && m.clip_thresholds.size() != m.dim) {
    fail(ErrorKind::kFormat, "clip thresholds do not match the model dimension");
  }
  return m;
}

void save_model(const DetectorModel& model, const std::string& path) {
  write_file_bytes(path, serialize_model(model));
}

DetectorModel load_model(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return deserialize_model(bytes);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

}  // namespace kpca
