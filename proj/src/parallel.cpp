#include "clinfilter/parallel.hpp"

#include <omp.h>

namespace clinfilter {
namespace {
int default_jobs = -1;
}

void set_jobs(int n) {
  if (default_jobs < 0) default_jobs = omp_get_max_threads();
  omp_set_num_threads(n > 0 ? n : default_jobs);
}

int jobs() { return omp_get_max_threads(); }

}  // namespace clinfilter
