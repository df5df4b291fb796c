#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "cure/parallel.h"
#include "doctest.h"

using cure::ParallelFor;
using cure::WorkerCount;

TEST_CASE("worker count follows CURE_THREADS") {
  ::setenv("CURE_THREADS", "3", 1);
  CHECK(WorkerCount() == 3);
  ::setenv("CURE_THREADS", "0", 1);
  CHECK(WorkerCount() >= 1);
  ::setenv("CURE_THREADS", "lots", 1);
  CHECK(WorkerCount() >= 1);
  ::unsetenv("CURE_THREADS");
  CHECK(WorkerCount() >= 1);
}

TEST_CASE("every index runs exactly once") {
  for (const char *threads : {"1", "2", "7"}) {
    ::setenv("CURE_THREADS", threads, 1);
    std::vector<std::atomic<int>> hits(1000);
    ParallelFor(1000, [&](int i) { hits[i]++; });
    for (const auto &h : hits) CHECK(h.load() == 1);
    ParallelFor(0, [&](int) { FAIL("called for n = 0"); });
  }
  ::unsetenv("CURE_THREADS");
}

TEST_CASE("the lowest failing index wins") {
  ::setenv("CURE_THREADS", "4", 1);
  for (int trial = 0; trial < 20; ++trial) {
    try {
      ParallelFor(200, [](int i) {
        if (i % 37 == 5) throw std::runtime_error(std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error &e) {
      CHECK(std::string(e.what()) == "5");
    }
  }
  ::unsetenv("CURE_THREADS");
}
