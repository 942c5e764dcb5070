#pragma once

#define APERIODIC_VERSION "0.1.0"
