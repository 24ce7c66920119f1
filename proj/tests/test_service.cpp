#include "doctest.h"

#include "pcl/service.hpp"

#include "httplib.h"

#include <atomic>
#include <filesystem>
#include <thread>

using namespace pcl;
using nlohmann::json;

namespace {

// Runs `f` and returns the ServiceError it raised.
template <class F>
ServiceError error_of(F&& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e;
  }
  FAIL("expected a ServiceError");
  return ServiceError(0, "", "");
}

json keep(const json& rec) { return {{"t", rec["t"]}, {"assignment", rec["assignment"]}}; }

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pcl_service_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("creating a session") {
  SessionManager manager;
  auto s = manager.create({{"problem", "grid"}});
  CHECK(s["session"] == "s000001");
  CHECK(s["weights"] == json(std::vector<double>(24, 0.0)));
  CHECK(s["t"] == 0);
  CHECK(s["phase"] == "awaiting-improvement");
  const auto& rec = s["recommendation"];
  CHECK(rec["t"] == 1);
  CHECK(rec["variables"].size() == 4);
  CHECK(rec["assignment"].size() == 4);
  CHECK(manager.recommendation("s000001") == rec);
  CHECK(manager.recommendation("s000001") == manager.recommendation("s000001"));
  CHECK(manager.create({{"problem", "grid"}})["session"] == "s000002");
  CHECK(manager.size() == 2);
}

TEST_CASE("custom and invalid initial configurations") {
  SessionManager manager;
  json ones = json::array();
  for (int k = 0; k < 16; ++k) ones.push_back(1);
  auto s = manager.create({{"problem", "grid"}, {"initial", ones}});
  CHECK(s["x"]["n00"] == 1);

  json initial = json::array();
  for (int k = 0; k < 35; ++k) initial.push_back(k == 1 ? 1 : 0);
  auto e = error_of([&] { manager.create({{"problem", "training"}, {"initial", initial}}); });
  CHECK(e.status() == 422);
  CHECK(e.code() == "infeasible");
  CHECK(e.details()["violated"] == json::array({"unavailable_day1_slot2"}));

  CHECK(error_of([&] { manager.create({{"problem", "nope"}}); }).status() == 404);
  CHECK(error_of([&] { manager.create({{"selection", "random"}}); }).status() == 400);
  CHECK(error_of([&] { manager.create({{"problem", "grid"}, {"colour", 1}}); }).status() == 400);
}

TEST_CASE("satisfied turns converge after two visits per part") {
  SessionManager manager;
  auto s = manager.create({{"problem", "grid"}, {"selection", "smallest"}});
  std::string id = s["session"];
  json rec = s["recommendation"];
  for (int t = 1; t <= 8; ++t) {
    CHECK(rec["t"] == t);
    auto r = manager.submit(id, keep(rec));
    CHECK(r["accepted"] == true);
    CHECK(r["satisfied"] == true);
    CHECK(r["branch"] == "I");
    CHECK(r["converged"] == (t == 8));
    rec = r["next"];
  }
  CHECK(rec.is_null());
  auto final_rec = manager.recommendation(id);
  CHECK(final_rec["phase"] == "converged");
  CHECK(final_rec.contains("configuration"));
  auto e = error_of([&] { manager.submit(id, {{"t", 9}, {"assignment", json::object()}}); });
  CHECK(e.status() == 409);
  CHECK(e.code() == "converged");
  CHECK(manager.state(id)["trace"].size() == 8);
}

TEST_CASE("rejected submissions") {
  SessionManager manager;
  auto s = manager.create({{"problem", "training"}, {"selection", "smallest"}});
  std::string id = s["session"];
  json rec = s["recommendation"];
  std::string part = rec["part"];

  json squats = json::object();
  for (const auto& [name, value] : rec["assignment"].items()) squats[name] = 6;
  auto e = error_of([&] { manager.submit(id, {{"t", rec["t"]}, {"assignment", squats}}); });
  CHECK(e.status() == 422);
  CHECK(e.code() == "infeasible");
  bool fatigue = false;
  for (const auto& name : e.details()["violated"])
    fatigue = fatigue || name.get<std::string>().rfind("fatigue_legs", 0) == 0;
  CHECK(fatigue);

  json foreign = rec["assignment"];
  foreign[part == "day1" ? "day2_slot1" : "day1_slot1"] = 0;
  CHECK(error_of([&] { manager.submit(id, {{"t", rec["t"]}, {"assignment", foreign}}); }).code() == "protocol_error");

  json out_of_domain = rec["assignment"];
  out_of_domain[out_of_domain.begin().key()] = 42;
  CHECK(error_of([&] { manager.submit(id, {{"t", rec["t"]}, {"assignment", out_of_domain}}); }).code() ==
        "invalid_value");

  auto stale = error_of([&] { manager.submit(id, {{"t", 5}, {"assignment", rec["assignment"]}}); });
  CHECK(stale.status() == 409);
  CHECK(stale.code() == "stale_turn");
  CHECK(error_of([&] { manager.submit(id, {{"assignment", rec["assignment"]}}); }).status() == 400);

  // The pending turn survives every rejection.
  CHECK(manager.recommendation(id) == rec);
  CHECK(manager.submit(id, keep(rec))["accepted"] == true);

  CHECK(error_of([&] { manager.state("s999999"); }).status() == 404);
  manager.remove(id);
  CHECK(error_of([&] { manager.recommendation(id); }).code() == "not_found");
}

TEST_CASE("concurrent submissions accept exactly one") {
  SessionManager manager;
  auto s = manager.create({{"problem", "hotel-small"}});
  std::string id = s["session"];
  json body = keep(s["recommendation"]);
  std::atomic<int> accepted{0}, conflicts{0}, other{0};
  std::vector<std::thread> threads;
  for (int k = 0; k < 8; ++k)
    threads.emplace_back([&] {
      try {
        manager.submit(id, body);
        ++accepted;
      } catch (const ServiceError& e) {
        (e.status() == 409 ? conflicts : other)++;
      }
    });
  for (auto& t : threads) t.join();
  CHECK(accepted == 1);
  CHECK(conflicts == 7);
  CHECK(other == 0);
  CHECK(manager.state(id)["t"] == 1);
}

TEST_CASE("context summaries") {
  SessionManager manager;
  auto grid = manager.create({{"problem", "grid"}, {"selection", "smallest"}})["recommendation"];
  CHECK(grid["part"] == "b11");
  const auto& ctx = grid["context"];
  REQUIRE(ctx["neighbors"].size() == 2);
  for (const auto& n : ctx["neighbors"]) {
    CHECK(n["local"] == true);
    CHECK(n["values"].size() == 2);
  }
  CHECK(ctx["neighbors"][0]["part"] == "b01");
  CHECK(ctx["neighbors"][0]["values"].contains("n13"));
  CHECK(ctx["globals"].empty());

  auto training = manager.create({{"problem", "training"}})["recommendation"]["context"];
  CHECK(training["neighbors"].size() == 6);
  CHECK(training["globals"].size() == 10);

  auto hotel = manager.create({{"problem", "hotel"}})["recommendation"]["context"];
  bool budget = false;
  for (const auto& s : hotel["summaries"])
    if (s["name"] == "budget used %") budget = s["value"] == 0.0;
  CHECK(budget);
}

TEST_CASE("journal replay restores sessions") {
  auto dir = scratch_dir("journal");
  json before;
  std::string id;
  {
    SessionManager manager(dir);
    auto s = manager.create({{"problem", "grid"}, {"seed", 4}});
    id = s["session"];
    json rec = s["recommendation"];
    for (int t = 0; t < 5; ++t) {
      json flipped = rec["assignment"];
      if (t % 2 == 0)
        for (auto& [name, value] : flipped.items()) value = 1 - value.get<int>();
      rec = manager.submit(id, {{"t", rec["t"]}, {"assignment", flipped}})["next"];
    }
    before = manager.state(id);
  }
  SessionManager restored(dir);
  auto after = restored.state(id);
  CHECK(after["t"] == before["t"]);
  CHECK(after["weights"] == before["weights"]);
  CHECK(after["x"] == before["x"]);
  CHECK(after["streak"] == before["streak"]);
  CHECK(after["phase"] == before["phase"]);
  CHECK(restored.create({{"problem", "grid"}})["session"] == "s000002");
  restored.remove(id);
  CHECK_FALSE(std::filesystem::exists(dir / (id + ".jsonl")));
  std::filesystem::remove_all(dir);
}

TEST_CASE("HTTP routes") {
  SessionManager manager;
  httplib::Server server;
  bind_routes(server, manager);
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);

  auto problems = client.Get("/problems");
  REQUIRE(problems);
  CHECK(json::parse(problems->body).size() == 4);

  auto created = client.Post("/sessions", R"({"problem": "grid", "selection": "smallest"})", "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  auto body = json::parse(created->body);
  std::string id = body["session"];

  auto rec = client.Get("/sessions/" + id + "/recommendation");
  REQUIRE(rec);
  CHECK(rec->status == 200);
  auto turn = json::parse(rec->body);
  CHECK(turn == body["recommendation"]);

  auto submitted = client.Post("/sessions/" + id + "/improvement", keep(turn).dump(), "application/json");
  REQUIRE(submitted);
  CHECK(submitted->status == 200);
  CHECK(json::parse(submitted->body)["accepted"] == true);

  auto stale = client.Post("/sessions/" + id + "/improvement", keep(turn).dump(), "application/json");
  REQUIRE(stale);
  CHECK(stale->status == 409);
  auto err = json::parse(stale->body);
  CHECK(err["code"] == "stale_turn");
  CHECK(err.contains("message"));
  CHECK(err["details"]["pending"] == 2);

  auto malformed = client.Post("/sessions/" + id + "/improvement", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);

  auto state = client.Get("/sessions/" + id + "/state");
  REQUIRE(state);
  CHECK(json::parse(state->body)["t"] == 1);

  auto removed = client.Delete("/sessions/" + id);
  REQUIRE(removed);
  CHECK(removed->status == 200);
  CHECK(json::parse(removed->body)["deleted"] == id);
  auto missing = client.Get("/sessions/" + id + "/state");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["code"] == "not_found");

  server.stop();
  thread.join();
}
