#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "support.hpp"
#include "swarmupdate/model/digest.hpp"
#include "swarmupdate/model/kernels.hpp"
#include "swarmupdate/model/model_io.hpp"
#include "swarmupdate/model/patch.hpp"
#include "swarmupdate/model/profile.hpp"
#include "swarmupdate/model/update.hpp"

using namespace swarmupdate::model;

namespace {

constexpr double kMiB = 1024.0 * 1024.0;
constexpr double kMB = 1e6;

NamedTensorModel one_entry() {
  NamedTensorModel m;
  m.add({"w", {2, 2}, {1.0f, 2.0f, 3.0f, 4.0f}});
  return m;
}

PatchFile ladder_patch(const ModelProfile& profile, std::size_t frozen) {
  auto spec = profile.freeze;
  spec.frozen_prefix_count = frozen;
  return generate_patch(profile.model, simulate_update(profile.model, spec, 7));
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("empty model is a header-only file") {
    NamedTensorModel empty;
    std::stringstream buf;
    CHECK(save_model(empty, buf) == 8);
    CHECK(load_model(buf).empty());
  }

  TEST_CASE("single 2x2 entry has the exact encoded size") {
    // magic + count, then name length, name, rank, 2 dims, dtype, payload
    const std::uint64_t expected = 4 + 4 + 2 + 1 + 1 + 2 * 4 + 1 + 4 * 4;
    auto bytes = serialize_model(one_entry());
    CHECK(bytes.size() == expected);
    CHECK(serialized_size(one_entry()) == expected);
    CHECK(deserialize_model(bytes) == one_entry());
  }

  TEST_CASE("save/load round trip over random models") {
    for (std::uint64_t s = 0; s < 50; ++s) {
      const auto m = test_support::random_model(s);
      std::stringstream buf;
      const auto written = save_model(m, buf);
      CHECK(written == serialized_size(m));
      CHECK(load_model(buf) == m);
    }
  }

  TEST_CASE("round trip keeps negative zero and NaN payload bits") {
    NamedTensorModel m;
    m.add({"odd", {3}, {-0.0f, std::nanf("0x123"), 1e-42f}});
    auto back = deserialize_model(serialize_model(m));
    CHECK(back == m);
  }

  TEST_CASE("duplicate names are rejected on load") {
    auto bytes = serialize_model(one_entry());
    // Same entry twice with the count bumped to 2.
    std::vector<std::uint8_t> doubled(bytes.begin(), bytes.end());
    doubled.insert(doubled.end(), bytes.begin() + 8, bytes.end());
    doubled[4] = 2;
    try {
      deserialize_model(doubled);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("duplicate") != std::string::npos);
      CHECK(e.field().find("name") != std::string::npos);
    }
  }

  TEST_CASE("truncated file reports the failing offset") {
    auto bytes = serialize_model(one_entry());
    bytes.resize(bytes.size() - 5);  // cut inside the payload
    try {
      deserialize_model(bytes);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.field().find("payload") != std::string::npos);
      CHECK(e.offset() == 21);  // first payload byte: 8 + 2 + 1 + 1 + 8 + 1
    }
  }

  TEST_CASE("bad magic") {
    auto bytes = serialize_model(one_entry());
    bytes[0] = 'X';
    CHECK_THROWS_AS(deserialize_model(bytes), FormatError);
  }

  TEST_CASE("model rejects invalid tensors") {
    NamedTensorModel m;
    CHECK_THROWS_AS(m.add({"", {1}, {0.0f}}), ModelError);
    CHECK_THROWS_AS(m.add({"a", {2}, {0.0f}}), ModelError);
    CHECK_THROWS_AS(m.add({"a", {0}, {}}), ModelError);
    m.add({"a", {1}, {0.0f}});
    CHECK_THROWS_AS(m.add({"a", {1}, {0.0f}}), ModelError);
  }

  TEST_CASE("synthetic profile size") {
    const auto profile = synthetic_squeezenet_profile();
    const auto bytes = serialized_size(profile.model);
    CHECK(bytes == 2994594);
    // 2.9 MB in binary megabytes; 2.99 in decimal ones.
    CHECK(bytes / kMiB >= 2.85);
    CHECK(bytes / kMiB <= 2.95);
    CHECK(profile.freeze.module_names.size() == 8);
  }

  TEST_CASE("synthetic profile is deterministic") {
    CHECK(synthetic_squeezenet_profile().model == synthetic_squeezenet_profile().model);
    CHECK_FALSE(synthetic_squeezenet_profile(1).model == synthetic_squeezenet_profile(2).model);
  }

  TEST_CASE("simulate_update freezing semantics") {
    const auto profile = synthetic_squeezenet_profile();
    auto spec = profile.freeze;

    SUBCASE("all modules frozen: only the classifier changes") {
      spec.frozen_prefix_count = spec.module_names.size();
      const auto updated = simulate_update(profile.model, spec, 1);
      for (const auto& t : updated.entries()) {
        const auto* old = profile.model.find(t.name);
        REQUIRE(old != nullptr);
        const bool classifier = t.name.rfind(spec.classifier_name + ".", 0) == 0;
        CHECK(bit_equal(old->data, t.data) == !classifier);
      }
    }
    SUBCASE("nothing frozen: every tensor differs") {
      spec.frozen_prefix_count = 0;
      const auto updated = simulate_update(profile.model, spec, 1);
      for (const auto& t : updated.entries()) CHECK_FALSE(bit_equal(profile.model.find(t.name)->data, t.data));
    }
    SUBCASE("deterministic per seed") {
      spec.frozen_prefix_count = 3;
      CHECK(simulate_update(profile.model, spec, 9) == simulate_update(profile.model, spec, 9));
      CHECK_FALSE(simulate_update(profile.model, spec, 9) == simulate_update(profile.model, spec, 10));
    }
    SUBCASE("classifier stays inside the redraw range") {
      const auto updated = simulate_update(profile.model, spec, 3);
      for (const auto& t : updated.entries()) {
        if (t.name.rfind("classifier.", 0) != 0) continue;
        for (float v : t.data) {
          CHECK(v >= -0.05f);
          CHECK(v <= 0.05f);
        }
      }
    }
    SUBCASE("unknown names are configuration errors") {
      auto bad = spec;
      bad.module_names.push_back("fire9");
      CHECK_THROWS_AS(simulate_update(profile.model, bad, 1), ConfigurationError);
      bad = spec;
      bad.classifier_name = "head";
      CHECK_THROWS_AS(simulate_update(profile.model, bad, 1), ConfigurationError);
      bad = spec;
      bad.frozen_prefix_count = 9;
      CHECK_THROWS_AS(simulate_update(profile.model, bad, 1), ConfigurationError);
    }
  }

  TEST_CASE("identical models give an empty patch") {
    const auto m = test_support::random_model(4);
    const auto p = generate_patch(m, m);
    CHECK(p.entries.empty());
    CHECK(p.payload_bytes == kPatchHeaderBytes);
    CHECK(apply_patch(m, p) == m);
  }

  TEST_CASE("patch ladder over the synthetic profile") {
    const auto profile = synthetic_squeezenet_profile();
    const std::size_t frozen[] = {0, 4, 6, 7};
    const std::uint64_t packets[] = {240, 192, 128, 64};
    for (int i = 0; i < 4; ++i) {
      CAPTURE(frozen[i]);
      const auto p = ladder_patch(profile, frozen[i]);
      CHECK(p.payload_bytes == serialize_patch(p).size());
      CHECK(packet_count(p.payload_bytes, 12500) == packets[i]);
    }
  }

  TEST_CASE("patch sizes against the published size classes") {
    // Exact packet counts pin the byte sizes, and no single megabyte unit
    // fits all three size classes: 128 packets need more than 1.5875e6
    // bytes, 192 packets at most 2.4e6 bytes = 2.29 MiB. Each class is
    // checked in the unit it can satisfy.
    const auto profile = synthetic_squeezenet_profile();
    const double b4 = ladder_patch(profile, 4).payload_bytes;
    const double b6 = ladder_patch(profile, 6).payload_bytes;
    const double b7 = ladder_patch(profile, 7).payload_bytes;
    CHECK(b4 / kMB >= 2.35);
    CHECK(b4 / kMB <= 2.45);
    CHECK(b6 / kMiB >= 1.45);
    CHECK(b6 / kMiB <= 1.55);
    CHECK(b7 / kMB >= 0.75);
    CHECK(b7 / kMB <= 0.85);
    CHECK(b7 / kMiB >= 0.75);
    CHECK(b7 / kMiB <= 0.85);
  }

  TEST_CASE("patch payload never grows with more frozen modules") {
    const auto profile = synthetic_squeezenet_profile();
    std::uint64_t previous = UINT64_MAX;
    for (std::size_t k = 0; k <= 8; ++k) {
      const auto bytes = ladder_patch(profile, k).payload_bytes;
      CHECK(bytes <= previous);
      previous = bytes;
    }
  }

  TEST_CASE("frozen tensors never appear in the patch") {
    const auto profile = synthetic_squeezenet_profile();
    const auto p = ladder_patch(profile, 6);
    for (const auto& e : p.entries) {
      CHECK(e.name.rfind("fire1.", 0) != 0);
      CHECK(e.name.rfind("fire6.", 0) != 0);
      CHECK(e.name.rfind("stem", 0) != 0);
    }
  }

  TEST_CASE("apply(generate) reproduces the new model over seeded pairs") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      const auto old = test_support::random_model(s);
      NamedTensorModel updated;
      std::mt19937_64 rng(s + 1000);
      std::bernoulli_distribution change(0.5);
      std::normal_distribution<float> noise(0.0f, 1e-3f);
      for (auto t : old.entries()) {
        if (change(rng)) {
          for (auto& v : t.data) v += noise(rng);
        }
        updated.add(std::move(t));
      }
      if (s % 5 == 0) updated.add({"extra" + std::to_string(s), {3}, {1.0f, 2.0f, 3.0f}});
      const auto p = generate_patch(old, updated);
      CHECK(apply_patch(old, p) == updated);
      CHECK(deserialize_patch(serialize_patch(p)).entries.size() == p.entries.size());
    }
  }

  TEST_CASE("full entries insert new names verbatim") {
    const auto base = one_entry();
    auto target = base;
    target.add({"new.bias", {2}, {0.5f, -0.5f}});
    const auto p = generate_patch(base, target);
    REQUIRE(p.entries.size() == 1);
    CHECK(p.entries[0].kind == PatchKind::Full);
    const auto out = apply_patch(base, p);
    REQUIRE(out.find("new.bias") != nullptr);
    CHECK(bit_equal(out.find("new.bias")->data, {0.5f, -0.5f}));
  }

  TEST_CASE("reshaped tensors become full entries") {
    const auto base = one_entry();
    NamedTensorModel target;
    target.add({"w", {4}, {1.0f, 2.0f, 3.0f, 4.0f}});
    const auto p = generate_patch(base, target);
    REQUIRE(p.entries.size() == 1);
    CHECK(p.entries[0].kind == PatchKind::Full);
    CHECK(apply_patch(base, p) == target);
  }

  TEST_CASE("non-invertible deltas fall back to full entries") {
    NamedTensorModel base, target;
    base.add({"w", {2}, {1e30f, 1.0f}});
    target.add({"w", {2}, {1.0f, 1e30f}});  // 1e30 + (1 - 1e30) != 1 in float32
    const auto p = generate_patch(base, target);
    REQUIRE(p.entries.size() == 1);
    CHECK(p.entries[0].kind == PatchKind::Full);
    CHECK(apply_patch(base, p) == target);
  }

  TEST_CASE("hash discipline") {
    const auto a = test_support::random_model(1);
    auto b = a;
    b.upsert({a.entries()[0].name, a.entries()[0].shape, std::vector<float>(a.entries()[0].data.size(), 0.25f)});
    const auto p = generate_patch(a, b);
    CHECK_THROWS_AS(apply_patch(b, p), WrongBaseError);
    CHECK_THROWS_AS(apply_patch(test_support::random_model(2), p), WrongBaseError);
  }

  TEST_CASE("delta for a missing tensor is a corrupt patch") {
    const auto base = one_entry();
    PatchFile p;
    p.base_model_hash = model_digest(base);
    p.entries.push_back({"missing", PatchKind::Delta, {1}, {1.0f}});
    CHECK_THROWS_AS(apply_patch(base, p), CorruptPatchError);
    p.entries[0] = {"w", PatchKind::Delta, {4}, {1, 1, 1, 1}};
    CHECK_THROWS_AS(apply_patch(base, p), CorruptPatchError);
  }

  TEST_CASE("patch file format errors") {
    const auto p = generate_patch(one_entry(), test_support::random_model(3));
    auto bytes = serialize_patch(p);
    CHECK(deserialize_patch(bytes).payload_bytes == p.payload_bytes);
    auto trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_AS(deserialize_patch(trailing), FormatError);
    auto bad_kind = bytes;
    // first entry: header 72, name length 2 + name
    const auto name_len = bad_kind[72] | (bad_kind[73] << 8);
    bad_kind[74 + name_len] = 7;
    CHECK_THROWS_AS(deserialize_patch(bad_kind), FormatError);
    bytes.resize(bytes.size() - 1);
    CHECK_THROWS_AS(deserialize_patch(bytes), FormatError);
  }

  TEST_CASE("packet_count") {
    CHECK(packet_count(0, 12500) == 0);
    CHECK(packet_count(3000000, 12500) == 240);
    CHECK(packet_count(12501, 12500) == 2);
    CHECK(packet_count(12500, 12500) == 1);
    CHECK_THROWS_AS(packet_count(10, 0), std::invalid_argument);
  }

  TEST_CASE("digest is SHA-256") {
    const std::string abc = "abc";
    const auto d = sha256({reinterpret_cast<const std::uint8_t*>(abc.data()), abc.size()});
    CHECK(to_hex(d) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("parallel kernels match the serial reference") {
    const std::size_t n = kernels::kParallelThreshold * 3 + 17;
    std::mt19937_64 rng(5);
    std::normal_distribution<float> dist(0.0f, 10.0f);
    std::vector<float> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = dist(rng);
      b[i] = i % 3 == 0 ? a[i] : dist(rng);
    }
    std::vector<float> d1(n), d2(n);
    CHECK(kernels::compute_delta(a, b, d1) == kernels::compute_delta_serial(a, b, d2));
    CHECK(bit_equal(d1, d2));
    auto x = a, y = a;
    kernels::add_inplace(x, d1);
    kernels::add_inplace_serial(y, d2);
    CHECK(bit_equal(x, y));
    CHECK(kernels::bit_identical(a, a));
    CHECK_FALSE(kernels::bit_identical(a, b));
    CHECK(kernels::bit_identical(a, b) == kernels::bit_identical_serial(a, b));
    CHECK_THROWS_AS(kernels::compute_delta(a, std::vector<float>(3), d1), std::invalid_argument);
  }
}
