#include <doctest.h>

#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "headlinecast/errors.hpp"
#include "headlinecast/io.hpp"
#include "headlinecast/jsonio.hpp"
#include "headlinecast/pipeline.hpp"
#include "headlinecast/synth.hpp"
#include "temp_dir.hpp"

using namespace hcast;

namespace {

synth::SyntheticSpec bench_spec() {
    synth::SyntheticSpec spec;
    spec.n_headlines = 150;
    spec.n_isins = 12;
    spec.start = Date::parse("2005-01-03");
    spec.end = Date::parse("2005-12-30");
    spec.history_days = 70;
    spec.seed = 19;
    return spec;
}

pipeline::PipelineConfig bench_config(const std::filesystem::path& data_dir,
                                      const std::filesystem::path& out_dir) {
    pipeline::PipelineConfig config;
    config.headlines_path = data_dir / "headlines.jsonl";
    config.prices_path = data_dir / "prices.csv";
    config.market_path = data_dir / "market.csv";
    config.out_dir = out_dir;
    config.min_df = 2;
    config.seed = 7;
    config.forest.n_trees = 30;
    config.rae.dim = 6;
    config.rae.iterations = 12;
    config.rae.learning_rate = 0.5;
    return config;
}

const std::vector<std::string>& artifact_names() {
    static const std::vector<std::string> names{
        "comparison.json", "comparison.txt", "labeled.jsonl",   "manifest.json",
        "metrics_rae.json", "metrics_rf.json", "model_rae.json", "model_rf.json",
        "preds_rae.jsonl", "preds_rf.jsonl",  "rae_loss.csv",   "split.json",
        "tokens_rae.jsonl", "tokens_rf.jsonl",
    };
    return names;
}

} // namespace

TEST_CASE("an end-to-end run produces every artifact and consistent counts") {
    TempDir data("pipe-data"), out("pipe-out");
    synth::write_corpus(data.path(), synth::generate(bench_spec()));
    const auto config = bench_config(data.path(), out / "run");
    const auto result = pipeline::run_pipeline(config);

    for (const auto& name : artifact_names()) {
        CAPTURE(name);
        CHECK(std::filesystem::exists(result.out_dir / name));
    }
    CHECK_FALSE(std::filesystem::exists(result.out_dir / ".lock")); // released

    const auto& counts = result.counts;
    CHECK(counts.headlines_in == 150);
    CHECK(counts.dropped_empty_tokens == 0); // titles always carry signal words
    CHECK(counts.ar_failures == 0);          // enough history by construction
    CHECK(counts.excluded_below_floor == 0); // start prices well above the floor
    CHECK(counts.excluded_missing_price == 0);
    CHECK(counts.labeled_kept == 150);
    CHECK(counts.steady_dropped == 0); // planted jumps dwarf the threshold
    CHECK(counts.n_train + counts.n_test == 150);
    CHECK(counts.n_train == 120); // floor(150 * 0.8 + 0.5)

    CHECK(result.forest_metrics.n == counts.n_test);
    CHECK(result.rae_metrics.n == counts.n_test);
    CHECK(result.comparison.baseline.accuracy == result.forest_metrics.accuracy);

    // The split respects the timeline.
    const auto split = io::load_split(result.out_dir / "split.json");
    CHECK(static_cast<int>(split.train_ids.size()) == counts.n_train);
    CHECK(static_cast<int>(split.test_ids.size()) == counts.n_test);

    // Direction labels recovered from prices agree with the planted truth.
    const auto planted = io::load_labeled(data / "planted_labels.jsonl");
    std::map<std::string, eventstudy::Direction> truth;
    for (const auto& p : planted) truth[p.headline_id] = p.direction;
    const auto labeled = io::load_labeled(result.out_dir / "labeled.jsonl");
    REQUIRE_FALSE(labeled.empty());
    int agree = 0, considered = 0;
    for (const auto& s : labeled) {
        if (s.direction == eventstudy::Direction::steady) continue;
        ++considered;
        if (truth.at(s.headline_id) == s.direction) ++agree;
    }
    CHECK(considered > 0);
    CHECK(static_cast<double>(agree) / considered >= 0.99);

    // Manifest: config echo, fingerprint, and the artifact inventory.
    const auto manifest = jsonio::load_file(result.out_dir / "manifest.json");
    CHECK(manifest.at("config_hash").get<std::string>().size() == 16);
    CHECK(manifest.at("counts").at("n_train").get<int>() == counts.n_train);
    CHECK(manifest.at("artifacts").get<std::vector<std::string>>() == artifact_names());
    CHECK(manifest.at("config").at("rae").at("seed").get<std::uint64_t>() == 9); // seed + 2
}

TEST_CASE("identical configs write byte-identical artifacts") {
    TempDir data("pipe-det-data"), out("pipe-det-out");
    synth::write_corpus(data.path(), synth::generate(bench_spec()));

    const auto first = pipeline::run_pipeline(bench_config(data.path(), out / "a"));
    const auto second = pipeline::run_pipeline(bench_config(data.path(), out / "b"));
    for (const auto& name : artifact_names()) {
        if (name == "manifest.json") continue; // echoes the differing out_dir
        CAPTURE(name);
        CHECK(read_text(first.out_dir / name) == read_text(second.out_dir / name));
    }

    // The manifests differ only through the output location.
    auto a = jsonio::load_file(first.out_dir / "manifest.json");
    auto b = jsonio::load_file(second.out_dir / "manifest.json");
    a["config"].erase("out_dir");
    b["config"].erase("out_dir");
    a.erase("config_hash");
    b.erase("config_hash");
    CHECK(a == b);
}

TEST_CASE("config files are parsed strictly") {
    TempDir dir("pipe-config");
    const auto path = dir / "config.json";

    write_text(path, R"({"min_df": 2, "rae": {"dim": 8}})");
    const auto config = pipeline::load_pipeline_config(path);
    CHECK(config.min_df == 2);
    CHECK(config.rae.dim == 8);
    CHECK(config.window == 60); // untouched default

    write_text(path, R"({"headlinez": "typo.jsonl"})");
    CHECK_THROWS_WITH_AS(pipeline::load_pipeline_config(path),
                         doctest::Contains("unknown key \"headlinez\""), ConfigError);

    write_text(path, R"({"rae": {"dims": 8}})");
    CHECK_THROWS_WITH_AS(pipeline::load_pipeline_config(path),
                         doctest::Contains("unknown key \"dims\" in rae config"), ConfigError);

    write_text(path, R"({"forest": {"trees": 10}})");
    CHECK_THROWS_AS(pipeline::load_pipeline_config(path), ConfigError);

    write_text(path, R"({"ar_mode": "levered"})");
    CHECK_THROWS_WITH_AS(pipeline::load_pipeline_config(path),
                         doctest::Contains("unknown ar_mode"), ConfigError);

    write_text(path, "[1, 2, 3]");
    CHECK_THROWS_AS(pipeline::load_pipeline_config(path), ConfigError);

    CHECK_THROWS_AS(pipeline::load_pipeline_config(dir / "absent.json"), ConfigError);
}

TEST_CASE("a second run cannot enter a locked output directory") {
    TempDir data("pipe-lock-data"), out("pipe-lock-out");
    auto spec = bench_spec();
    spec.n_headlines = 40;
    synth::write_corpus(data.path(), synth::generate(spec));

    const auto out_dir = out / "run";
    std::filesystem::create_directories(out_dir);
    write_text(out_dir / ".lock", "");
    auto config = bench_config(data.path(), out_dir);
    CHECK_THROWS_WITH_AS(pipeline::run_pipeline(config),
                         doctest::Contains("locked by another run"), ConfigError);

    // Clearing the stale lock unblocks the run.
    std::filesystem::remove(out_dir / ".lock");
    const auto result = pipeline::run_pipeline(config);
    CHECK(std::filesystem::exists(result.out_dir / "manifest.json"));
}

TEST_CASE("the output directory can be redirected through the environment") {
    TempDir data("pipe-env-data"), out("pipe-env-out");
    auto spec = bench_spec();
    spec.n_headlines = 40;
    synth::write_corpus(data.path(), synth::generate(spec));

    const auto redirected = out / "redirected";
    REQUIRE(setenv("HEADLINECAST_OUT", redirected.string().c_str(), 1) == 0);
    const auto result = pipeline::run_pipeline(bench_config(data.path(), out / "ignored"));
    unsetenv("HEADLINECAST_OUT");

    CHECK(result.out_dir == redirected);
    CHECK(std::filesystem::exists(redirected / "manifest.json"));
    CHECK_FALSE(std::filesystem::exists(out / "ignored"));
}

TEST_CASE("broken inputs surface with the failing stage named") {
    TempDir data("pipe-err-data"), out("pipe-err-out");
    auto spec = bench_spec();
    spec.n_headlines = 40;
    synth::write_corpus(data.path(), synth::generate(spec));

    auto config = bench_config(data.path(), out / "run1");
    config.headlines_path = data / "missing.jsonl";
    CHECK_THROWS_WITH_AS(pipeline::run_pipeline(config), doctest::Contains("ingest:"), DataError);

    config = bench_config(data.path(), out / "run2");
    config.window = 0;
    CHECK_THROWS_AS(pipeline::run_pipeline(config), ConfigError);

    config = bench_config(data.path(), out / "run3");
    config.train_fraction = 1.5;
    CHECK_THROWS_AS(pipeline::run_pipeline(config), ConfigError);

    // A price file missing one security fails the labeling stage by name.
    const auto prices = io::load_prices(data / "prices.csv");
    eventstudy::PriceStore pruned = prices;
    pruned.erase(pruned.begin());
    io::save_prices(data / "pruned.csv", pruned);
    config = bench_config(data.path(), out / "run4");
    config.prices_path = data / "pruned.csv";
    CHECK_THROWS_WITH_AS(pipeline::run_pipeline(config),
                         doctest::Contains("label: no price series"), DataError);
}
