#include <doctest.h>

#include <filesystem>
#include <random>

#include "glab/io.hpp"

using namespace glab;

TEST_SUITE("io") {
  TEST_CASE("sparse vectors survive a JSON round trip") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::bernoulli_distribution keep(0.4), complex(0.3);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<SparseVector::Entry> e;
      for (Index k = 1; k <= 30; ++k)
        if (keep(rng)) e.emplace_back(k * 7, complex(rng) ? Scalar(u(rng), u(rng)) : Scalar(u(rng) / 3.0, 0.0));
      const SparseVector x(e);
      const std::string text = io::dump(io::to_json(x));
      CHECK(io::sparse_from_json(io::json::parse(text)) == x);
      CHECK(io::parse_sparse_text(io::to_text(x)) == x);
    }
  }

  TEST_CASE("text vectors") {
    CHECK(io::parse_sparse_text("1:1 3:-2.5") == SparseVector{{1, 1.0}, {3, -2.5}});
    CHECK(io::parse_sparse_text("2:(0,1)") == SparseVector{{2, Scalar(0.0, 1.0)}});
    CHECK(io::parse_sparse_text("") == SparseVector{});
    CHECK_THROWS_AS(io::parse_sparse_text("0:1"), ParseError);
    CHECK_THROWS_AS(io::parse_sparse_text("1:x"), ParseError);
    CHECK_THROWS_AS(io::parse_sparse_text("1-2"), ParseError);
    CHECK_THROWS_AS(io::parse_sparse_text("1:1 1:2"), ParseError);
    CHECK_THROWS_AS(io::sparse_from_json(io::json::parse(R"({"1": "a"})")), ParseError);
    CHECK(io::sparse_from_json(io::json::parse(R"({"4": [1, -1], "2": 3})")) ==
          SparseVector{{2, 3.0}, {4, Scalar(1.0, -1.0)}});
  }

  TEST_CASE("vectors load from files") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string jpath = (dir / "glab_io_vec.json").string(), tpath = (dir / "glab_io_vec.txt").string();
    io::write_file(jpath, R"({"1": 0.5, "3": -1})");
    io::write_file(tpath, "1:0.5\n3:-1\n");
    const SparseVector want{{1, 0.5}, {3, -1.0}};
    CHECK(io::load_vector(jpath) == want);
    CHECK(io::load_vector(tpath) == want);
    CHECK(io::load_vector("1:0.5 3:-1") == want);
  }

  TEST_CASE("parameter tables") {
    ParamTable t;
    t.name = "mu";
    t.window = IndexSet::range(1, 8);
    t.entries[1].value = 1.0;
    t.entries[2].value = 1.5;
    t.entries[3].value = std::nullopt;
    t.entries[2].witness.sets = {IndexSet{1, 2}, IndexSet{5, 6}};
    const auto j = io::to_json(t);
    CHECK(j["name"] == "mu");
    CHECK(j["mode"] == "exact");
    CHECK(j["window"] == io::json::array({1, 8}));
    CHECK(j["values"]["2"] == 1.5);
    CHECK(j["values"]["3"].is_null());
    CHECK(j["witnesses"]["2"]["sets"][1] == io::json::array({5, 6}));
    CHECK(io::table_csv(t) == "m,value\n1,1\n2,1.5\n3,\n");
  }

  TEST_CASE("doubles round-trip exactly") {
    for (double v : {0.1, 1.0 / 3.0, 2.0 / 3.0 * 1e-300, 123456789.123456789}) {
      const auto j = io::json::parse(io::dump(io::json{{"v", v}}));
      CHECK(j["v"].get<double>() == v);
    }
  }

  TEST_CASE("plot data and digests") {
    CHECK(io::plot_data({{1, 5}, {2, 9.5}}) == "1 5\n2 9.5\n");
    CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(io::manifest_path("out.json") == "out.json.manifest.json");
    io::RunManifest m;
    m.seed = 4;
    CHECK(m.to_json()["seed"] == 4);
  }

  TEST_CASE("reports serialize deterministically") {
    WitnessReport r;
    r.kind = "summing";
    r.ratio = 5.0;
    r.details = {{"b", 1.0}, {"a", 2.0}};
    const std::string a = io::dump(io::to_json(r)), b = io::dump(io::to_json(r));
    CHECK(a == b);
    // detail order is insertion order
    CHECK(a.find("\"b\"") < a.find("\"a\""));
  }
}
