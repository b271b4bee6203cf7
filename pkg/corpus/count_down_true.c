/* unbounded countdown: provable only by induction, not by unrolling */
int main() {
  unsigned int x = *;
  while (x > 0) x--;
  assert(x == 0);
}
