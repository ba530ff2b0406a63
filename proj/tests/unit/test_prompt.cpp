#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <set>
#include <thread>

#include <httplib.h>

#include "annimpute/errors.hpp"
#include "annimpute/prompt/completion.hpp"
#include "annimpute/prompt/scoring.hpp"
#include "annimpute/prompt/shots.hpp"
#include "annimpute/prompt/skeleton.hpp"
#include "annimpute/util/json_io.hpp"
#include "helpers.hpp"
#include "prompt_fixture.hpp"

using namespace annimpute;
using namespace annimpute::prompt;

TEST_CASE("published prompts are reproduced byte for byte") {
  const auto fillers = fixture::fillers();
  const auto skeletons = fixture::skeletons();
  for (const auto& c : fixture::published_prompts()) {
    CAPTURE(c.skeleton);
    const auto built = build_prompt(skeletons.find(c.skeleton), fillers, c.version, c.shots,
                                    c.description, testutil::schema(0, 4));
    CHECK(built == c.golden);
  }
}

TEST_CASE("version strings") {
  const auto fillers = fixture::fillers();
  auto v = parse_version("v4.-1.0.-1.1", fillers);
  CHECK(v.index == std::array<int, 5>{4, -1, 0, -1, 1});
  CHECK(v.str() == "v4.-1.0.-1.1");
  CHECK(parse_version("v-1.-1.-1.-1.-1", fillers) == PromptVersion{});
  for (const char* bad : {"", "4.-1.0.-1.1", "v4.-1.0.-1", "v4.-1.0.-1.1.0", "v4.-1.x.-1.1",
                          "v4..0.-1.1", "v5.-1.0.-1.1", "v4.-2.0.-1.1", "v4.-1.0.-1.7",
                          "v4.-1.0.-1.1 "}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_version(bad, fillers), UsageError);
  }
}

TEST_CASE("render template") {
  std::map<std::string, std::optional<std::string>> values{
      {"a", "A"}, {"b", std::nullopt}, {"c", "C"}};
  CHECK(render_template("{a}\n{b}\n{c}", values) == "A\nC");
  CHECK(render_template("{a}\n{c}\n{b}", values) == "A\nC");
  CHECK(render_template("x {b} y\n{a}", values) == "x  y\nA");
  CHECK(render_template("{a}{c}!", values) == "AC!");
  CHECK(render_template("", values).empty());
  CHECK_THROWS_AS(render_template("{missing}", values), DataError);
  CHECK_THROWS_AS(render_template("{a", values), DataError);
  CHECK_THROWS_AS(render_template("a}", values), DataError);
  CHECK_THROWS_AS(render_template("{}", values), DataError);
}

TEST_CASE("examples use the display form of labels") {
  LabelSchema half{0, 2, {}, 2};
  CHECK(format_examples({{"first", 1}, {"second", 2}}, half) ==
        "Example 1:\nText: first\nAnnotation from annotator: 0.5\n\n"
        "Example 2:\nText: second\nAnnotation from annotator: 1");
  CHECK(format_examples({}, half).empty());
  CHECK(format_target("t") == "Text: t\nAnnotation from annotator:");
}

TEST_CASE("version enumeration covers the used slots only") {
  const auto fillers = fixture::fillers();
  const auto skeletons = fixture::skeletons();
  CHECK(enumerate_versions(skeletons.find("imputed_1"), fillers).size() == 1);
  const auto orig = enumerate_versions(skeletons.find("orig_1"), fillers);
  CHECK(orig.size() == 6 * 3 * 8);
  std::set<std::string> distinct;
  for (const auto& v : orig) {
    distinct.insert(v.str());
    CHECK(v.index[1] == -1);
    CHECK(v.index[3] == -1);
    CHECK(parse_version(v.str(), fillers) == v);
  }
  CHECK(distinct.size() == orig.size());
  CHECK(orig.front() == PromptVersion{});
}

TEST_CASE("skeleton refuses a condition it does not serve") {
  const auto fillers = fixture::fillers();
  const auto skeletons = fixture::skeletons();
  ShotSet set;
  set.condition = Condition::Combined;
  set.held_out = {0, "t", 0};
  CHECK_THROWS_AS(build_prompt(skeletons.find("orig_1"), fillers, "v-1.-1.-1.-1.-1", set, "d",
                               testutil::schema(0, 4)),
                  UsageError);
  CHECK_THROWS_AS(static_cast<void>(skeletons.find("nope")), UsageError);
  CHECK(condition_from_string("imputed_only") == Condition::ImputedOnly);
  CHECK_THROWS_AS(condition_from_string("both"), UsageError);
  auto back = skeletons_from_json(skeletons_to_json(skeletons));
  CHECK(back.skeletons.size() == skeletons.skeletons.size());
  CHECK(fillers_from_json(fillers_to_json(fillers)).options == fillers.options);
}

TEST_CASE("shot assembly") {
  auto s = testutil::schema(0, 4);
  Dataset d;
  d.texts = {"a", "b", "c", "a", "d", "e", "f", "g", "b", "h"};
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < 10; ++i) {
    if (i % 2 == 0) cells.push_back({i, 0, static_cast<int>(i % 5)});
    cells.push_back({i, 1, 1});
  }
  d.matrix = AnnotationMatrix(10, 2, s, std::move(cells));
  LabelGrid imputed(10, 2);
  for (std::size_t i = 0; i < 10; ++i) imputed(i, 0) = 4;

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto set = assemble_shots(0, d, &imputed, Condition::Combined, seed);
    CHECK(d.matrix.at(set.held_out.item, 0) == set.held_out.label);
    std::set<std::string> texts{set.held_out.text};
    for (const Shot& sh : set.original) {
      CHECK(sh.text != set.held_out.text);
      CHECK(sh.item != set.held_out.item);
      CHECK(d.matrix.at(sh.item, 0) == sh.label);
      texts.insert(sh.text);
    }
    for (const Shot& sh : set.imputed) {
      CHECK_FALSE(d.matrix.has(sh.item, 0));
      CHECK(sh.label == 4);
      CHECK(texts.insert(sh.text).second);
    }
    auto all = set.shots();
    CHECK(all.size() == set.original.size() + set.imputed.size());
    if (!set.imputed.empty()) CHECK(all.front().item == set.imputed.front().item);
    auto again = assemble_shots(0, d, &imputed, Condition::Combined, seed);
    CHECK(again.held_out.item == set.held_out.item);
  }
  ShotLimits tight{1, 1};
  auto small = assemble_shots(1, d, &imputed, Condition::Combined, 3, tight);
  CHECK(small.original.size() == 1);
  CHECK(small.imputed.empty());
  CHECK(assemble_shots(0, d, nullptr, Condition::OriginalOnly, 1).imputed.empty());
  CHECK_THROWS_AS(assemble_shots(0, d, nullptr, Condition::ImputedOnly, 1), UsageError);
  CHECK_THROWS_AS(assemble_shots(2, d, nullptr, Condition::OriginalOnly, 1), DataError);
}

TEST_CASE("low response annotators") {
  auto s = testutil::schema(0, 1);
  AnnotationMatrix m(3, 4, s, {{0, 0, 1}, {1, 0, 1}, {2, 0, 1}, {0, 1, 0}, {0, 2, 0}, {1, 2, 0},
                                {0, 3, 1}});
  CHECK(select_low_response_annotators(m, 2) == std::vector<std::size_t>{1, 3});
  CHECK(select_low_response_annotators(m, 4) == std::vector<std::size_t>{1, 3, 2, 0});
  CHECK_THROWS_AS(select_low_response_annotators(m, 5), UsageError);
}

TEST_CASE("response parsing") {
  auto s = testutil::schema(0, 4);
  CHECK(parse_response(" 3 ", s) == 3);
  CHECK(parse_response("\n0\n", s) == 0);
  CHECK_FALSE(parse_response("3.", s).has_value());
  CHECK_FALSE(parse_response("5", s).has_value());
  CHECK_FALSE(parse_response("", s).has_value());
  CHECK_FALSE(parse_response("The annotator would say 3", s).has_value());
  LabelSchema half{0, 2, {}, 2};
  CHECK(parse_response("0.5", half) == 1);
  CHECK_FALSE(parse_response("1.0", half).has_value());
}

TEST_CASE("condition scoring and ties") {
  auto s = testutil::schema(0, 2);
  std::map<RunKey, std::vector<ParsedPair>> results;
  results[{Condition::OriginalOnly, "orig_2", "v1"}] = {{1, 1}, {std::nullopt, 2}};
  results[{Condition::OriginalOnly, "orig_1", "v9"}] = {{1, 1}, {std::nullopt, 2}};
  results[{Condition::OriginalOnly, "orig_1", "v8"}] = {{0, 1}, {0, 2}};
  results[{Condition::Combined, "combined", "v0"}] = {{1, 1}, {2, 2}};
  auto scores = score_conditions(results, s);
  CHECK(scores.at(Condition::Combined).best_f1 == 1.0);
  const auto& orig = scores.at(Condition::OriginalOnly);
  CHECK(orig.best_skeleton == "orig_1");
  CHECK(orig.best_version == "v9");
  CHECK(orig.best_f1 == doctest::Approx(0.5));
  CHECK(orig.f1_by_prompt.at({"orig_1", "v8"}) == 0.0);
  CHECK(scores_to_json(scores).size() == 2);

  results[{Condition::ImputedOnly, "imputed_1", "v0"}] = {};
  CHECK_THROWS_AS(score_conditions(results, s), DataError);
  results.erase({Condition::ImputedOnly, "imputed_1", "v0"});
  results[{Condition::ImputedOnly, "imputed_1", "v0"}] = {{1, 7}};
  CHECK_THROWS_AS(score_conditions(results, s), DataError);
}

TEST_CASE("prompt hash matches an independent serialisation") {
  // sha256 of json.dumps([p, m, t], separators=(",", ":"), ensure_ascii=False)
  CHECK(prompt_hash("hello", "gpt-3.5-turbo", 0.0) ==
        "4282288a234e4fa04622e8973174ba68ce7521706a2957d5f8f9bd83d87117b6");
  CHECK(prompt_hash("Text: caf\xc3\xa9 \"q\"\n", "m", 0.7) ==
        "a0953d108ddc80b92e935e29288d5da82eea34a22ed1ac9776c263ba774f9d39");
  CHECK(prompt_hash("hello", "gpt-3.5-turbo", 0.5) != prompt_hash("hello", "gpt-3.5-turbo", 0.0));
}

TEST_CASE("replay cache") {
  auto dir = testutil::temp_dir("prompt_cache");
  const auto path = dir / "cache.ndjson";
  const std::string h = prompt_hash("p", "gpt-3.5-turbo", 0.0);
  write_ndjson(path, {record_to_json({h, "gpt-3.5-turbo", 0.0, "2", ""}),
                      record_to_json({h, "gpt-3.5-turbo", 0.0, "4", ""})});
  CompletionCache cache(path);
  CHECK(cache.size() == 1);
  CompletionClient client(EndpointConfig{}, cache);
  CHECK(client.complete("p").raw_response == "2");
  try {
    client.complete("q");
    FAIL("expected a cache miss");
  } catch (const CacheMissError& e) {
    CHECK(e.prompt_hash() == prompt_hash("q", "gpt-3.5-turbo", 0.0));
  }
  CHECK(client.network_calls() == 0);

  cache.append({"abc", "m", 0.0, "1", "t"});
  cache.append({"abc", "m", 0.0, "3", "t"});
  CompletionCache reread(path);
  CHECK(reread.size() == 2);
  CHECK(reread.find("abc")->raw_response == "1");

  {
    std::ofstream out(dir / "bad.ndjson");
    out << "{not json\n";
  }
  CHECK_THROWS_AS(CompletionCache(dir / "bad.ndjson"), DataError);
}

TEST_CASE("live mode talks to a chat completions endpoint") {
  httplib::Server server;
  std::atomic<int> hits{0};
  std::string seen_auth;
  nlohmann::json seen_body;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    const std::string content = seen_body["messages"][0]["content"];
    if (content == "deny") {
      res.status = 401;
      return;
    }
    if (content == "boom") {
      res.status = 500;
      return;
    }
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", " 3"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  auto dir = testutil::temp_dir("prompt_live");
  CompletionCache cache(dir / "cache.ndjson");
  EndpointConfig cfg;
  cfg.mode = CompletionMode::Live;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.token_env = "ANNIMPUTE_TEST_TOKEN";
  cfg.timeout = std::chrono::seconds(5);

  ::unsetenv("ANNIMPUTE_TEST_TOKEN");
  CompletionClient client(cfg, cache);
  CHECK_THROWS_AS(client.complete("hi"), EndpointError);

  ::setenv("ANNIMPUTE_TEST_TOKEN", "secret", 1);
  auto r = client.complete("hi");
  CHECK(r.raw_response == " 3");
  CHECK(parse_response(r.raw_response, testutil::schema(0, 4)) == 3);
  CHECK(seen_auth == "Bearer secret");
  CHECK(seen_body["model"] == "gpt-3.5-turbo");
  CHECK(seen_body["temperature"] == 0.0);
  CHECK_FALSE(r.timestamp.empty());
  client.complete("hi");
  CHECK(hits == 1);
  CHECK(client.network_calls() == 1);

  CHECK_THROWS_AS(client.complete("deny"), EndpointError);
  CHECK_THROWS_AS(client.complete("boom"), EndpointError);

  CompletionCache reread(dir / "cache.ndjson");
  CHECK(reread.size() == 1);
  EndpointConfig replay = cfg;
  replay.mode = CompletionMode::Replay;
  CompletionClient offline(replay, reread);
  CHECK(offline.complete("hi").raw_response == " 3");

  ::unsetenv("ANNIMPUTE_TEST_TOKEN");
  server.stop();
  worker.join();
}
