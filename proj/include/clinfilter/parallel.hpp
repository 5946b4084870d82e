#pragma once

namespace clinfilter {

// Worker count for OpenMP regions. 0 restores the runtime default.
void set_jobs(int jobs);
int jobs();

}  // namespace clinfilter
