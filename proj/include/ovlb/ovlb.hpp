#pragma once

#include "ovlb/errors.hpp"
#include "ovlb/linalg.hpp"
#include "ovlb/spectrum.hpp"
#include "ovlb/moments.hpp"
#include "ovlb/indicator.hpp"
#include "ovlb/lp.hpp"
#include "ovlb/bounds.hpp"
#include "ovlb/serialize.hpp"
