void sort_bubble(int *v, int n)
{
    int pass = 0;
    do {
        pass = 0;
        for (int i = 1; i < n; i++) {
            if (v[i] < v[i - 1]) {
                int t = v[i - 1];
                v[i - 1] = v[i];
                v[i] = t;
                pass = 1;
            }
        }
    } while (pass);
}
