"""Writes tests/data/normal_table.csv: high-precision standard normal quantiles and CDF values."""
import sys
import mpmath as mp

mp.mp.dps = 40

probs = ["1e-12", "1e-9", "1e-6", "0.0001", "0.001", "0.01", "0.025", "0.05", "0.1", "0.2", "0.3",
         "0.4", "0.5", "0.6", "0.7", "0.75", "0.8", "0.9", "0.95", "0.975", "0.99", "0.995",
         "0.999", "0.9999", "0.999999"]
zs = ["-8", "-6", "-4", "-3", "-2.5", "-2", "-1", "-0.5", "0", "0.5", "1", "1.5", "2",
      "2.3263", "3", "4", "5"]

def quantile(p):
    return mp.sqrt(2) * mp.erfinv(2 * p - 1)

def cdf(z):
    return mp.ncdf(z)

out = sys.stdout if len(sys.argv) < 2 else open(sys.argv[1], "w")
out.write("kind,arg,value\n")
for p in probs:
    out.write("quantile,%s,%s\n" % (p, mp.nstr(quantile(mp.mpf(p)), 25)))
for z in zs:
    out.write("cdf,%s,%s\n" % (z, mp.nstr(cdf(mp.mpf(z)), 25)))
