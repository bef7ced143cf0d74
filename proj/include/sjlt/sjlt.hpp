#pragma once

#include "sjlt/errors.hpp"
#include "sjlt/hash_projection.hpp"
#include "sjlt/io.hpp"
#include "sjlt/params.hpp"
#include "sjlt/preconditioners.hpp"
#include "sjlt/randomness.hpp"
#include "sjlt/text.hpp"
#include "sjlt/transforms.hpp"
#include "sjlt/vector.hpp"
#include "sjlt/verification.hpp"
#include "sjlt/bench.hpp"
