/* accumulate pairwise products */
int dotProduct(int a[], int b[], int len)
{
    int total = 0;
    int i = 0;
    while (i < len) {
        total = total + a[i] * b[i];
        i++;
    }
    return total;
}
